class WireError(ValueError):
    """Malformed or truncated wire data, or an unencodable value."""

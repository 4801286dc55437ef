class UsageError(ValueError):
    """Invalid combination of inputs or options supplied by the caller."""

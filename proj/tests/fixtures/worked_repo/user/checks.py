def validate_user(record):
    if record is None:
        return False
    flags = getattr(record, "flags", ())
    return "disabled" not in flags and bool(record.email)

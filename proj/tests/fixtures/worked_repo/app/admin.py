def lookup(service, tok):
    user = service.get_user(tok.value())
    return user

from user.service import UserService
from user.token import UidTok
from user.checks import validate_user


def handle_request(store, raw):
    service = UserService(store)
    tok = UidTok(raw)
    user = service.get_user(tok.value())
    if validate_user(user):

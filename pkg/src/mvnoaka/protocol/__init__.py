from .aka import (
    check_fresh,
    cn_issue_uid,
    cn_process_m3_make_m4,
    gnb_forward_m4,
    gnb_make_m1,
    gnb_process_m2_make_m3,
    ue_prepare_session,
    ue_process_m1_make_m2,
    ue_process_m4,
)
from .handover import (
    cn_sync_handover_list,
    gnb_make_ho_m1,
    ho_gnb_process_m2_make_m3,
    ho_ue_make_m2,
    ho_ue_process_m3,
    ue_prepare_handover,
)
from .messages import (
    MESSAGE_TYPES,
    Abort,
    AkaM1,
    AkaM2,
    AkaM3,
    AkaM4,
    GnbCertificate,
    HoM1,
    HoM2,
    HoM3,
    Message,
    UidRecord,
)
from .registration import (
    exchange_params,
    make_ue,
    mno_register_gnb,
    mno_setup_cn,
    mvno_credential,
    mvno_register_user,
    mvno_register_users,
    mvno_setup,
    push_aka_list,
    ue_refresh_lists,
)
from .revocation import RevocationNotice, cn_apply_revocation, revoke_user
from .state import (
    DEFAULT_SKEW_MS,
    CnPublicKeys,
    CnState,
    GnbPublic,
    GnbState,
    MnoState,
    MvnoState,
    SeenCache,
    Session,
    UeState,
    UserCredential,
)

__all__ = [name for name in dir() if not name.startswith("_")]

from ._combipen import (
    CombipenError,
    Penalty,
    SetFunction,
    berhu,
    experiment,
    fit,
    from_table,
    instance,
    lce,
    lovasz,
    path,
)

__all__ = [
    "CombipenError",
    "Penalty",
    "SetFunction",
    "berhu",
    "experiment",
    "fit",
    "from_table",
    "instance",
    "lce",
    "lovasz",
    "path",
]

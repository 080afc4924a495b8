def enforce_required_kwargs(called_args: dict, required_kwargs: list[str]) -> None:
    """
    Keyword arguments default to None so a call reads as self-describing;
    the ones listed here must still be given.
    """
    for arg, value in called_args.items():
        if arg not in required_kwargs:
            continue

        if value is None:
            raise ValueError(f"'{arg}' cannot be None")

"""Configuration resolvers for the tracercorr package."""

import os


def get_reference_f(name):
    r"""Get the tabulated long-horizon correlation factor of a lattice.

    Parameters
    ----------
    name : str
        Built-in lattice name.

    Returns
    -------
    float | None
        First reference value, or None for lattices without one.
    """
    from tracercorr.lattice.builtin import REFERENCE_F

    values = REFERENCE_F.get(str(name))
    return values[0] if values else None


def get_coordination(name):
    r"""Get the coordination number of a built-in lattice.

    Parameters
    ----------
    name : str
        Built-in lattice name.

    Returns
    -------
    int | None
        Largest coordination number, or None for unknown names.
    """
    from tracercorr.lattice.builtin import BUILTIN_LATTICES, build_builtin

    if str(name) not in BUILTIN_LATTICES:
        return None
    return build_builtin(str(name), 2).max_coordination


def nmax_range(n_upto):
    r"""Get every truncation horizon from 2 to ``n_upto``.

    Parameters
    ----------
    n_upto : int
        Largest horizon.

    Returns
    -------
    list[int]
        Horizons ``2..n_upto``.
    """
    return list(range(2, int(n_upto) + 1))


def get_thread_count(value):
    r"""Get the worker count, capped by ``CORRFACTOR_THREADS``.

    Parameters
    ----------
    value : int | str | None
        Requested count; None or an empty value means one worker.

    Returns
    -------
    int
        Worker count, at least 1.
    """
    threads = int(value) if value not in (None, "", "null") else 1
    cap = os.environ.get("CORRFACTOR_THREADS")
    if cap:
        threads = min(threads, int(cap))
    return max(threads, 1)

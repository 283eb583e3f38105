"""Binary checkpoints.

Layout (all integers little-endian):

    8 bytes   magic  b"MPOLCKPT"
    u32       format version (1)
    u32       header length H in bytes
    H bytes   UTF-8 JSON header
    payload   little-endian float64 arrays, C order, in the order
              u (n_x_modes, Jy), omega (n_x_modes, My), theta (n_x_modes, My),
              then, if header["has_history"], the previous explicit terms
              F_u, F_omega, F_theta with the same shapes.

The JSON header holds ``domain`` ({"l"}), ``resolution`` ({"Nx", "My", "Jy",
"quad_x", "quad_y"}), ``params``, ``t``, ``steps``, ``scheme`` and
``has_history``.  Saving after step n and resuming reproduces the
uninterrupted run bit for bit.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .dynamics import Bases, PhysParams, State
from .spectral_core import DomainSpec, Resolution

MAGIC = b"MPOLCKPT"
VERSION = 1
_F64 = np.dtype("<f8")


class CheckpointError(ValueError):
    pass


def save_checkpoint(path, state: State, params: PhysParams | None = None, scheme: str | None = None) -> None:
    res, dom = state.omega.basis.res, state.omega.basis.domain
    header = {
        "domain": {"l": dom.l},
        "resolution": {"Nx": res.Nx, "My": res.My, "Jy": res.Jy, "quad_x": res.quad_x, "quad_y": res.quad_y},
        "params": params.as_dict() if params is not None else None,
        "t": state.t,
        "steps": state.steps,
        "scheme": scheme,
        "has_history": state.history is not None,
    }
    blob = json.dumps(header, sort_keys=True).encode()
    arrays = list(state.coefficient_arrays())
    if state.history is not None:
        arrays += list(state.history)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(blob)))
        fh.write(blob)
        for arr in arrays:
            fh.write(np.ascontiguousarray(arr, dtype=_F64).tobytes())


def read_header(path) -> dict:
    with open(path, "rb") as fh:
        return _read_header(fh)


def _read_header(fh) -> dict:
    if fh.read(len(MAGIC)) != MAGIC:
        raise CheckpointError("not a checkpoint file (bad magic)")
    version, n = struct.unpack("<II", fh.read(8))
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    return json.loads(fh.read(n).decode())


def load_checkpoint(path, bases: Bases | None = None) -> tuple[State, dict]:
    """Read a checkpoint; builds the bases from the header unless compatible ones are given."""
    path = Path(path)
    with open(path, "rb") as fh:
        header = _read_header(fh)
        payload = fh.read()
    r = header["resolution"]
    res = Resolution(r["Nx"], r["My"], r["Jy"], r["quad_x"], r["quad_y"])
    dom = DomainSpec(header["domain"]["l"])
    if bases is None:
        bases = Bases.build(dom, res)
    elif bases.res != res or bases.domain != dom:
        raise CheckpointError(f"checkpoint resolution {res} / domain {dom} does not match the supplied bases")
    vshape, sshape = bases.vector.shape, bases.scalar.shape
    shapes = [vshape, sshape, sshape] * (2 if header["has_history"] else 1)
    need = sum(int(np.prod(s)) for s in shapes) * _F64.itemsize
    if len(payload) != need:
        raise CheckpointError(f"payload has {len(payload)} bytes, expected {need}")
    data = np.frombuffer(payload, dtype=_F64)
    arrays, off = [], 0
    for s in shapes:
        k = int(np.prod(s))
        arrays.append(data[off : off + k].reshape(s).astype(float))
        off += k
    state = State.zero(bases).with_coeffs(
        *arrays[:3],
        t=float(header["t"]),
        steps=int(header["steps"]),
        history=tuple(arrays[3:]) if header["has_history"] else None,
    )
    return state, header

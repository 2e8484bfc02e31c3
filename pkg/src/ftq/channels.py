"""Quantum channels as Kraus-operator collections.

A channel is stored as a stacked complex array of Kraus operators
(env_dim, out_dim, in_dim). Constructors for the named noise families,
tensor powers, composition and the complementary (environment) output
of the Stinespring dilation live here, together with the JSON
channel-spec file loader.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ChannelCompletenessError,
    ChannelDimensionError,
    ChannelParseError,
    ValidationError,
)

COMPLETENESS_ATOL = 1e-10
FILE_COMPLETENESS_ATOL = 1e-8

# Kraus-set sizes past this would not fit desk scale (env_dim^g blowup).
MAX_TOTAL_DIM = 1 << 20


@dataclass(frozen=True)
class QuantumChannel:
    """A CPTP map given by Kraus operators K_i: rho -> sum K_i rho K_i^dag.

    kraus is a (env_dim, out_dim, in_dim) complex array. `base` and
    `power` record how a tensor-power channel was built so the
    optimizer can seed from single-copy solutions.
    """

    kraus: np.ndarray
    label: str = "channel"
    base: "QuantumChannel | None" = field(default=None, repr=False, compare=False)
    power: int = 1

    def __post_init__(self):
        k = np.asarray(self.kraus, dtype=complex)
        if k.ndim != 3:
            raise ValidationError("kraus must be a stack of matrices (env, out, in)")
        object.__setattr__(self, "kraus", k)
        acc = np.tensordot(k.conj(), k, axes=([0, 1], [0, 1]))
        err = np.max(np.abs(acc - np.eye(self.in_dim)))
        if err > COMPLETENESS_ATOL:
            raise ChannelCompletenessError(
                f"{self.label}: sum K^dag K deviates from identity by {err:.3e}"
            )

    @property
    def env_dim(self) -> int:
        return self.kraus.shape[0]

    @property
    def out_dim(self) -> int:
        return self.kraus.shape[1]

    @property
    def in_dim(self) -> int:
        return self.kraus.shape[2]


def apply(channel: QuantumChannel, rho: np.ndarray) -> np.ndarray:
    """Channel output sum_i K_i rho K_i^dag."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (channel.in_dim, channel.in_dim):
        raise ValidationError(
            f"state dim {rho.shape} does not match channel input dim {channel.in_dim}"
        )
    k = channel.kraus
    t = k @ rho
    return np.tensordot(t, k.conj(), axes=([0, 2], [0, 2]))


def complementary_apply(channel: QuantumChannel, rho: np.ndarray) -> np.ndarray:
    """Environment output of the Stinespring isometry V psi = sum_i K_i psi (x) |i>.

    The result is the env_dim x env_dim matrix M[i, j] = Tr(K_j^dag K_i rho).
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (channel.in_dim, channel.in_dim):
        raise ValidationError(
            f"state dim {rho.shape} does not match channel input dim {channel.in_dim}"
        )
    k = channel.kraus
    t = k @ rho  # (env, out, in)
    # M[i, j] = Tr(K_i rho K_j^dag) = sum_{a,b} t[i,a,b] conj(k[j,a,b])
    return np.tensordot(t, k.conj(), axes=([1, 2], [1, 2]))


def tensor_power(channel: QuantumChannel, g: int) -> QuantumChannel:
    """g-fold tensor power: Kraus set of all g-fold products (env_dim^g operators)."""
    if g < 1:
        raise ValidationError(f"tensor power g={g} must be >= 1")
    if channel.env_dim**g * channel.out_dim**g * channel.in_dim**g > MAX_TOTAL_DIM:
        raise ValidationError(
            f"tensor power g={g} of '{channel.label}' exceeds the memory budget"
        )
    if g == 1:
        return channel
    kraus = channel.kraus
    for _ in range(g - 1):
        # kron over all pairs: new[i*e + j] = old_i (x) base_j
        kraus = np.einsum("iab,jcd->ijacbd", kraus, channel.kraus).reshape(
            kraus.shape[0] * channel.env_dim,
            kraus.shape[1] * channel.out_dim,
            kraus.shape[2] * channel.in_dim,
        )
    return QuantumChannel(
        kraus,
        label=f"{channel.label}^x{g}",
        base=channel.base if channel.base is not None else channel,
        power=channel.power * g,
    )


def compose(second: QuantumChannel, first: QuantumChannel) -> QuantumChannel:
    """Sequential composition: apply(compose(N2, N1), rho) = N2(N1(rho))."""
    if first.out_dim != second.in_dim:
        raise ValidationError(
            f"cannot compose: first output dim {first.out_dim} "
            f"!= second input dim {second.in_dim}"
        )
    kraus = np.einsum("jab,ibc->ijac", second.kraus, first.kraus).reshape(
        first.env_dim * second.env_dim, second.out_dim, first.in_dim
    )
    return QuantumChannel(kraus, label=f"{second.label}o{first.label}")


_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def identity_channel(dim: int = 2) -> QuantumChannel:
    return QuantumChannel(np.eye(dim, dtype=complex)[None, :, :], label="identity")


def depolarizing(p: float) -> QuantumChannel:
    """Qubit depolarizing channel rho -> (1-p) rho + p I/2.

    Kraus set {sqrt(1-3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z}.
    In this parameterization the single-copy coherent information of the
    maximally mixed input hits zero near p = 0.2524 (not 0.1893, which
    belongs to the rho -> (1-p) rho + (p/3)(XrhoX + YrhoY + ZrhoZ) form).
    """
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"depolarizing parameter {p} outside [0, 1]")
    kraus = np.stack(
        [
            math.sqrt(1.0 - 3.0 * p / 4.0) * _I2,
            math.sqrt(p / 4.0) * _X,
            math.sqrt(p / 4.0) * _Y,
            math.sqrt(p / 4.0) * _Z,
        ]
    )
    return QuantumChannel(kraus, label=f"depolarizing({p:g})")


def dephasing(p: float) -> QuantumChannel:
    """Qubit dephasing, Kraus {sqrt(1-p) I, sqrt(p) Z}; off-diagonals scale by 1-2p."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"dephasing parameter {p} outside [0, 1]")
    kraus = np.stack([math.sqrt(1.0 - p) * _I2, math.sqrt(p) * _Z])
    return QuantumChannel(kraus, label=f"dephasing({p:g})")


def amplitude_damping(gamma: float) -> QuantumChannel:
    """Qubit amplitude damping, K0 = [[1,0],[0,sqrt(1-g)]], K1 = [[0,sqrt(g)],[0,0]]."""
    if not 0.0 <= gamma <= 1.0:
        raise ValidationError(f"amplitude damping parameter {gamma} outside [0, 1]")
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    return QuantumChannel(np.stack([k0, k1]), label=f"amplitude_damping({gamma:g})")


def load_channel(path) -> QuantumChannel:
    """Load a channel from a JSON channel-spec file.

    Format: {"label": str, "in_dim": int, "out_dim": int,
    "kraus": [[[[re, im], ...cols], ...rows], ...operators]}.
    Completeness is validated to 1e-8.
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ChannelParseError(f"cannot read channel file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ChannelParseError(f"channel file {path} is not valid JSON: {exc}") from exc

    if not isinstance(doc, dict):
        raise ChannelParseError(f"channel file {path}: top level must be an object")
    for key in ("in_dim", "out_dim", "kraus"):
        if key not in doc:
            raise ChannelParseError(f"channel file {path}: missing key '{key}'")
    label = str(doc.get("label", "custom"))
    in_dim, out_dim = int(doc["in_dim"]), int(doc["out_dim"])
    raw = doc["kraus"]
    if not isinstance(raw, list) or not raw:
        raise ChannelParseError(f"channel file {path}: 'kraus' must be a non-empty list")

    ops = []
    for idx, mat in enumerate(raw):
        try:
            arr = np.asarray(mat, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ChannelParseError(
                f"channel file {path}: operator {idx} is not a numeric array"
            ) from exc
        if arr.ndim != 3 or arr.shape[2] != 2:
            raise ChannelParseError(
                f"channel file {path}: operator {idx} entries must be [re, im] pairs"
            )
        if arr.shape[:2] != (out_dim, in_dim):
            raise ChannelDimensionError(
                f"channel file {path}: operator {idx} has shape {arr.shape[:2]}, "
                f"expected ({out_dim}, {in_dim})"
            )
        ops.append(arr[..., 0] + 1j * arr[..., 1])

    kraus = np.stack(ops)
    acc = np.tensordot(kraus.conj(), kraus, axes=([0, 1], [0, 1]))
    err = np.max(np.abs(acc - np.eye(in_dim)))
    if err > FILE_COMPLETENESS_ATOL:
        raise ChannelCompletenessError(
            f"channel file {path}: sum K^dag K deviates from identity by {err:.3e}"
        )
    return QuantumChannel(_project_completeness(kraus), label=label)


def save_channel(channel: QuantumChannel, path) -> None:
    """Write a channel to the JSON channel-spec format read by load_channel."""
    kraus = [
        [[[float(z.real), float(z.imag)] for z in row] for row in op]
        for op in channel.kraus
    ]
    doc = {
        "label": channel.label,
        "in_dim": channel.in_dim,
        "out_dim": channel.out_dim,
        "kraus": kraus,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def _project_completeness(kraus: np.ndarray) -> np.ndarray:
    """Rescale a near-complete Kraus set so sum K^dag K = I exactly.

    File inputs are accepted at 1e-8 but the in-memory invariant is
    1e-10, so loaded sets are polished by the inverse square root of
    sum K^dag K.
    """
    acc = np.tensordot(kraus.conj(), kraus, axes=([0, 1], [0, 1]))
    w, u = np.linalg.eigh(acc)
    inv_sqrt = (u / np.sqrt(w)) @ u.conj().T
    return kraus @ inv_sqrt


@dataclass(frozen=True)
class NoiseFamily:
    """A single-parameter family of channels, e.g. depolarizing(p).

    `make` maps a parameter value inside `lo..hi` to a QuantumChannel.
    """

    family_id: str
    param_name: str
    lo: float
    hi: float
    make: callable = field(repr=False, compare=False, default=None)

    def instantiate(self, value: float) -> QuantumChannel:
        if not self.lo <= value <= self.hi:
            raise ValidationError(
                f"{self.family_id} parameter {value} outside range "
                f"[{self.lo}, {self.hi}]"
            )
        return self.make(value)

    def with_range(self, lo: float, hi: float) -> "NoiseFamily":
        return NoiseFamily(self.family_id, self.param_name, lo, hi, self.make)


# Dephasing is restricted to [0, 0.5] as a family: past full dephasing the
# channel retraces itself and coherent information turns back up, which
# would break the monotone threshold search.
BUILTIN_FAMILIES = {
    "depolarizing": NoiseFamily("depolarizing", "p", 0.0, 1.0, depolarizing),
    "dephasing": NoiseFamily("dephasing", "p", 0.0, 0.5, dephasing),
    "amplitude_damping": NoiseFamily("amplitude_damping", "gamma", 0.0, 1.0, amplitude_damping),
}


def family(family_id: str) -> NoiseFamily:
    """Look up a built-in noise family by id."""
    key = family_id.replace("-", "_")
    if key not in BUILTIN_FAMILIES:
        raise ValidationError(
            f"unknown noise family '{family_id}' "
            f"(built-in: {', '.join(sorted(BUILTIN_FAMILIES))})"
        )
    return BUILTIN_FAMILIES[key]


def custom_file_family(path) -> NoiseFamily:
    """A degenerate one-point family wrapping a channel-spec file."""
    channel = load_channel(path)
    return NoiseFamily("custom_file", "unused", 0.0, 0.0, lambda _p: channel)

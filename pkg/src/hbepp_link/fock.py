"""Brute-force click statistics in a truncated Fock space.

Independent ground truth for the closed-form path: the pair state is built
number-by-number from the squeezing interaction, rotated into the analysis
bases, squared into a photon-number distribution, thinned binomially by the
channel losses, and finally read out by threshold detectors with dark
counts. No step shares code with :mod:`hbepp_link.analytic`.

Why probabilities suffice after the rotation: the beam-splitter loss channel
maps photon-number diagonals to diagonals (a Fock-basis coherence |n><n'|
can only feed output coherences with the same n - n' offset, so diagonal
input populations fully determine diagonal output populations), and the
threshold-detector POVM is itself diagonal in photon number. All coherences
that matter are therefore consumed by the basis rotation, and tracking
|amplitude|^2 afterwards is exact, not an approximation.

State layout: the source emits equal photon numbers into Alice's and Bob's
arms, so the amplitude array is stored per pair number n as an
(n+1) x (n+1) block over (Alice photons in the ``+`` mode, Bob photons in
the ``+`` mode). The post-loss distribution is a dense 4-axis array over
occupations (a+, a-, b+, b-); memory scales as (n_max+1)^4 in that stage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import ChannelParams, MeasurementAngles, SourceParams
from .patterns import CANONICAL_PATTERNS, ProbabilityTable


def truncation_error_bound(g: float, n_max: int) -> float:
    """Probability mass of the pair-number tail discarded beyond ``n_max``.

    The weight of pair number n is (1-g^2)^2 (n+1) g^(2n); summing the
    geometric-derivative series beyond n_max gives, with x = g^2,
    (n_max+2) x^(n_max+1) - (n_max+1) x^(n_max+2).
    """
    if not 0.0 <= g < 1.0:
        raise ValueError(f"nonlinear gain must be in [0, 1), got {g}")
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    x = g * g
    return (n_max + 2) * x ** (n_max + 1) - (n_max + 1) * x ** (n_max + 2)


@dataclass(frozen=True, slots=True)
class TruncatedPairState:
    """Amplitudes of the (rotated) pair state, blocked by pair number.

    ``blocks[n][i, j]`` is the amplitude of i photons in Alice's first mode
    (n - i in her second) and j photons in Bob's first mode (n - j in his
    second). Before rotation the first modes are the H polarizations; after
    rotation they are the ``+`` analysis modes.
    """

    blocks: tuple[np.ndarray, ...]

    @property
    def n_max(self) -> int:
        return len(self.blocks) - 1

    def norm_squared(self) -> float:
        return float(sum(np.sum(b * b) for b in self.blocks))


@dataclass(frozen=True, slots=True)
class JointPhotonDistribution:
    """Probability mass over occupations of the four detector modes.

    ``probs[i, j, k, l]`` is the probability of i photons in a+, j in a-,
    k in b+, l in b-.
    """

    probs: np.ndarray

    @property
    def n_max(self) -> int:
        return self.probs.shape[0] - 1

    def total(self) -> float:
        return float(self.probs.sum())

    def pair_number_asymmetry(self) -> float:
        """Mass on occupations with unequal Alice/Bob photon totals.

        Zero (up to rounding) before loss: the source emits photons in
        pairs, one per arm.
        """
        n = self.n_max + 1
        idx = np.arange(n)
        alice = idx[:, None, None, None] + idx[None, :, None, None]
        bob = idx[None, None, :, None] + idx[None, None, None, :]
        return float(self.probs[alice != bob].sum())


def build_state(g: float, n_max: int) -> TruncatedPairState:
    """Pair-source state truncated at ``n_max`` pairs, in the H/V bases.

    The n-pair component is the n-th power of the antisymmetric pair
    creation operator (a1H+ a2V+ - a1V+ a2H+) applied to vacuum, normalized
    by n! sqrt(n+1) and weighted by (1-g^2) sqrt(n+1) g^n. The number-basis
    amplitudes are obtained by expanding the operator power binomially;
    term m raises (1H, 1V, 2H, 2V) occupations to (m, n-m, n-m, m).
    """
    if not 0.0 <= g < 1.0:
        raise ValueError(f"nonlinear gain must be in [0, 1), got {g}")
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    blocks = []
    for n in range(n_max + 1):
        block = np.zeros((n + 1, n + 1))
        weight = (1.0 - g * g) * math.sqrt(n + 1) * g**n
        for m in range(n + 1):
            coeff = math.comb(n, m) * (-1) ** (n - m)
            # each mode raised p times contributes sqrt(p!) on vacuum
            raising = math.sqrt(
                math.factorial(m) ** 2 * math.factorial(n - m) ** 2
            )
            amp = coeff * raising / (math.factorial(n) * math.sqrt(n + 1))
            # occupations: 1H=m, 1V=n-m (Alice), 2H=n-m, 2V=m (Bob)
            block[m, n - m] = weight * amp
        blocks.append(block)
    return TruncatedPairState(tuple(blocks))


def _rotation_block(n: int, theta: float) -> np.ndarray:
    """Fock-basis matrix of the polarization rotation on n photons.

    Entry [k, h] is the amplitude for occupation (h, n-h) of the (H, V)
    modes to appear as occupation (k, n-k) of the (+, -) analysis modes,
    from the binomial expansion of
    aH+ = cos(t) a+ - sin(t) a-,  aV+ = sin(t) a+ + cos(t) a-.
    """
    c, s = math.cos(theta), math.sin(theta)
    out = np.zeros((n + 1, n + 1))
    for h in range(n + 1):
        v = n - h
        p1 = np.array([math.comb(h, i) * c**i * (-s) ** (h - i) for i in range(h + 1)])
        p2 = np.array([math.comb(v, j) * s**j * c ** (v - j) for j in range(v + 1)])
        coeffs = np.convolve(p1, p2)  # index k = photons in the + mode
        norm_h = math.factorial(h) * math.factorial(v)
        for k in range(n + 1):
            out[k, h] = coeffs[k] * math.sqrt(
                math.factorial(k) * math.factorial(n - k) / norm_h
            )
    return out


def rotate_modes(
    state: TruncatedPairState, theta1: float, theta2: float
) -> TruncatedPairState:
    """Re-express the state in analysis bases rotated by theta1 and theta2.

    Acts within each pair-number block (the rotation conserves photon
    number per party) and preserves the norm.
    """
    rotated = []
    for n, block in enumerate(state.blocks):
        m1 = _rotation_block(n, theta1)
        m2 = _rotation_block(n, theta2)
        rotated.append(m1 @ block @ m2.T)
    return TruncatedPairState(tuple(rotated))


def photon_number_distribution(state: TruncatedPairState) -> JointPhotonDistribution:
    """Squared amplitudes scattered onto the four-mode occupation grid."""
    n_max = state.n_max
    probs = np.zeros((n_max + 1,) * 4)
    for n, block in enumerate(state.blocks):
        mass = block * block
        for i in range(n + 1):
            for j in range(n + 1):
                probs[i, n - i, j, n - j] += mass[i, j]
    return JointPhotonDistribution(probs)


def _binomial_thinning(n_max: int, tau: float) -> np.ndarray:
    """Transition matrix T[n, k]: k of n photons survive transmittance tau."""
    t = np.zeros((n_max + 1, n_max + 1))
    for n in range(n_max + 1):
        for k in range(n + 1):
            t[n, k] = math.comb(n, k) * tau**k * (1.0 - tau) ** (n - k)
    return t


def apply_loss(
    dist: JointPhotonDistribution, tau1: float, tau2: float
) -> JointPhotonDistribution:
    """Binomial beam-splitter thinning, tau1 on Alice's modes, tau2 on Bob's."""
    if not 0.0 < tau1 <= 1.0:
        raise ValueError(f"tau1 must be in (0, 1], got {tau1}")
    if not 0.0 < tau2 <= 1.0:
        raise ValueError(f"tau2 must be in (0, 1], got {tau2}")
    t1 = _binomial_thinning(dist.n_max, tau1)
    t2 = _binomial_thinning(dist.n_max, tau2)
    p = dist.probs
    # contracting axis 0 four times cycles the axes back into place
    for t in (t1, t1, t2, t2):
        p = np.tensordot(p, t, axes=([0], [0]))
    return JointPhotonDistribution(p)


def click_probabilities(
    dist: JointPhotonDistribution, dark_count: float = 0.0
) -> ProbabilityTable:
    """Threshold-detector readout of an occupation distribution.

    A detector on a mode with n photons clicks with probability 1 for
    n >= 1 and ``dark_count`` for n = 0, independently across the four
    detectors.
    """
    if not 0.0 <= dark_count < 1.0:
        raise ValueError(f"dark_count must be in [0, 1), got {dark_count}")
    n_max = dist.n_max
    readout = np.zeros((n_max + 1, 2))  # columns: (no click, click)
    readout[0, 0] = 1.0 - dark_count
    readout[0, 1] = dark_count
    readout[1:, 1] = 1.0
    t = dist.probs
    for _ in range(4):
        t = np.tensordot(t, readout, axes=([0], [0]))
    # t is now indexed by click bits in (a+, a-, b+, b-) order
    values = tuple(
        float(t[int(p.a_plus), int(p.a_minus), int(p.b_plus), int(p.b_minus)])
        for p in CANONICAL_PATTERNS
    )
    return ProbabilityTable(values)


def oracle_probabilities(
    source: SourceParams,
    channel: ChannelParams,
    angles: MeasurementAngles,
    n_max: int = 40,
) -> ProbabilityTable:
    """Full brute-force pipeline: build, rotate, square, thin, read out."""
    state = build_state(source.g, n_max)
    state = rotate_modes(state, angles.theta1, angles.theta2)
    dist = photon_number_distribution(state)
    dist = apply_loss(dist, channel.tau1, channel.tau2)
    return click_probabilities(dist, channel.dark_count)

"""Quadratic pencil L(lambda, eta) = lambda^2 M - lambda eta G - A.

M and G are real symmetric positive semidefinite, A real symmetric, and the
joint kernel of the three matrices is trivial.  The featured case carries a
rank-one coupling G = b e e^T.  Spectra are computed through a shifted
reversal of the pencil: substitute nu = lambda - sigma with L(sigma, eta)
invertible, reverse mu = 1/nu, and solve the standard companion eigenproblem
of the reversed polynomial.  Eigenvalues at infinity (singular M) show up as
mu ~ 0 and are discarded but counted.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import linalg
from .errors import (
    ConditionViolation,
    DimensionMismatch,
    InvalidInput,
    MassNotDefinite,
    NotAnEigenvalue,
    PreconditionKerMA,
    ShiftExhausted,
)

_EPS = np.finfo(float).eps


@dataclass
class RankOneCoupling:
    """G = b * e e^T with e a coordinate axis (e_index, 0-based)."""

    b: float
    e_index: int


@dataclass
class ConditionReport:
    clauses: list  # (name, passed, detail)

    @property
    def all_pass(self):
        return all(ok for _, ok, _ in self.clauses)

    def failed(self):
        return [name for name, ok, _ in self.clauses if not ok]


class PencilSpec:
    """Validated triple (M, G, A) plus derived constants.

    beta = max(0, -lambda_min(A)) is the lower-bound constant of A,
    m_mass = lambda_min(M), g_top = lambda_max(G).  scale is used to make
    thresholds dimensionless.
    """

    def __init__(self, m, g, a, rank_one=None, validate=True,
                 m_kind="dense", g_kind=None):
        self.m = linalg.as_matrix(m, "M")
        self.g = linalg.as_matrix(g, "G")
        self.a = linalg.as_matrix(a, "A")
        if self.m.shape != self.g.shape or self.m.shape != self.a.shape:
            raise DimensionMismatch("M, G, A must share one shape")
        self.n = self.m.shape[0]
        self.rank_one = rank_one
        # serialization hints only; no semantic content
        self.m_kind = m_kind
        self.g_kind = g_kind or ("rank_one" if rank_one is not None else "dense")

        m_eigs = sla.eigvalsh(self.m, check_finite=False)
        g_eigs = sla.eigvalsh(self.g, check_finite=False)
        a_eigs = sla.eigvalsh(0.5 * (self.a + self.a.T), check_finite=False)
        self.m_mass = float(m_eigs[0])
        self.g_min = float(g_eigs[0])
        self.g_top = float(g_eigs[-1])
        self.beta = max(0.0, -float(a_eigs[0]))
        self.norm_m = float(np.max(np.abs(m_eigs))) if self.n else 0.0
        self.norm_g = float(np.max(np.abs(g_eigs))) if self.n else 0.0
        self.norm_a = float(np.max(np.abs(a_eigs))) if self.n else 0.0
        self.spec_norm = max(self.norm_m, self.norm_g, self.norm_a)
        self.scale = max(1.0, self.spec_norm)
        self._ker_ma = None

        if validate:
            report = validate_condition_I(self)
            if not report.all_pass:
                raise ConditionViolation(
                    "hypotheses violated: %s" % ", ".join(report.failed()),
                    report,
                )

    @property
    def ker_ma_trivial(self):
        """True iff ker M intersect ker A = {0} (rank of [M; A] is n)."""
        if self._ker_ma is None:
            stacked = np.vstack([self.m, self.a])
            self._ker_ma = linalg.rank_with_tol(stacked) == self.n
        return self._ker_ma


def validate_condition_I(spec):
    """Per-clause validity report for the standing hypotheses."""
    clauses = []
    psd_tol_m = 1e-10 * max(1.0, spec.norm_m)
    psd_tol_g = 1e-10 * max(1.0, spec.norm_g)
    sym_m = linalg.symmetry_defect(spec.m) <= 1e-12 * max(1.0, linalg.max_abs(spec.m))
    sym_g = linalg.symmetry_defect(spec.g) <= 1e-12 * max(1.0, linalg.max_abs(spec.g))
    sym_a = linalg.symmetry_defect(spec.a) <= 1e-12 * max(1.0, linalg.max_abs(spec.a))
    m_min = float(sla.eigvalsh(0.5 * (spec.m + spec.m.T), check_finite=False)[0])
    g_min = float(sla.eigvalsh(0.5 * (spec.g + spec.g.T), check_finite=False)[0])
    clauses.append((
        "m_symmetric_psd", sym_m and m_min >= -psd_tol_m,
        "lambda_min(M)=%.3e" % m_min,
    ))
    clauses.append((
        "g_symmetric_psd", sym_g and g_min >= -psd_tol_g,
        "lambda_min(G)=%.3e" % g_min,
    ))
    clauses.append(("a_symmetric", sym_a,
                    "defect=%.3e" % linalg.symmetry_defect(spec.a)))
    stacked = np.vstack([spec.m, spec.g, spec.a])
    joint = linalg.rank_with_tol(stacked) == spec.n
    clauses.append(("joint_kernel_trivial", joint, "rank[M;G;A] vs n=%d" % spec.n))
    if spec.rank_one is not None:
        b = spec.rank_one.b
        k = spec.rank_one.e_index
        ok = b > 0 and 0 <= k < spec.n
        if ok:
            outer = np.zeros_like(spec.g)
            outer[k, k] = b
            ok = float(np.linalg.norm(spec.g - outer)) <= 1e-10 * b
        clauses.append(("g_rank_one_consistent", ok, "b=%r e_index=%r" % (b, k)))
    return ConditionReport(clauses)


def evaluate(spec, lam, eta):
    """L(lambda, eta) = lambda^2 M - lambda eta G - A, exact evaluation."""
    return (lam * lam) * spec.m - (lam * eta) * spec.g - spec.a


@dataclass
class EigenRecord:
    lam: complex
    alg_mult: int
    geo_mult: int
    type1_mult: int
    type2_mult: int
    vectors: np.ndarray  # columns span (an approximation of) ker L(lam, eta)
    residual: float
    zero_flagged: bool = False
    types_classified: bool = True


@dataclass
class SpectrumResult:
    eta: float
    records: list
    n_finite: int
    discarded_infinite: int
    scale: float

    def values(self, expand=False):
        if expand:
            out = []
            for r in self.records:
                out.extend([r.lam] * r.alg_mult)
            return np.asarray(out)
        return np.asarray([r.lam for r in self.records])

    def find(self, lam, tol=None):
        """Record whose representative lies within cluster tolerance of lam."""
        if not self.records:
            return None
        if tol is None:
            tol = 1e-6 * max(1.0, abs(lam))
        best = min(self.records, key=lambda r: abs(r.lam - lam))
        if abs(best.lam - lam) <= tol:
            return best
        return None

    @property
    def types_classified(self):
        return all(r.types_classified for r in self.records)


def choose_shift(spec, eta):
    """First candidate shift keeping L(sigma, eta) comfortably invertible."""
    thresh = 1e-8 * max(spec.spec_norm, np.finfo(float).tiny)
    for sigma in linalg.SHIFT_CANDIDATES:
        if linalg.smallest_singular_value(evaluate(spec, sigma, eta)) > thresh:
            return sigma
    raise ShiftExhausted(
        "no candidate shift regularizes L(sigma, eta=%r)" % (eta,)
    )


def _cluster_points(lams, zero_tol=0.0):
    """Single-linkage clusters with gap tolerance 1e-6 * max(1, mean |.|).

    Points inside the numerically-zero band (|lam| <= zero_tol) are forced
    into a single cluster: a defective zero pair can split symmetrically by
    slightly more than the gap tolerance and must still report as one
    eigenvalue at the origin.
    """
    npts = len(lams)
    if npts == 0:
        return []
    pts = np.asarray(lams)
    dist = np.abs(pts[:, None] - pts[None, :])
    mags = np.abs(pts)
    tol = 1e-6 * np.maximum(1.0, 0.5 * (mags[:, None] + mags[None, :]))
    near = dist <= tol
    if zero_tol > 0.0:
        zmask = mags <= zero_tol
        if np.count_nonzero(zmask) > 1:
            near = near | (zmask[:, None] & zmask[None, :])
    adj = csr_matrix(near)
    ncomp, labels = connected_components(adj, directed=False)
    clusters = [[] for _ in range(ncomp)]
    for i, lab in enumerate(labels):
        clusters[lab].append(i)
    return clusters


def _kernel_tol(spec, rep, eta, spread, svals_max, nrows):
    """Rank cutoff for L evaluated at a cluster representative.

    The representative is off the true eigenvalue by at most the cluster
    spread, which perturbs L by spread*(2|rep| ||M|| + eta ||G||) + spread^2 ||M||.
    """
    pert = spread * (2.0 * abs(rep) * spec.norm_m + abs(eta) * spec.norm_g)
    pert += spread * spread * spec.norm_m
    return max(nrows * _EPS * svals_max, 3.0 * pert, 1e-13 * spec.scale)


def _classify_stacked(spec, rep, eta, spread):
    """dim(ker L(rep) ∩ ker G) from the rank of L stacked over G."""
    lmat = evaluate(spec, rep, eta)
    stacked = np.vstack([lmat, spec.g.astype(lmat.dtype)])
    svals = sla.svdvals(stacked)
    tol = _kernel_tol(spec, rep, eta, spread, float(svals[0]), stacked.shape[0])
    rank = int(np.count_nonzero(svals > tol))
    return spec.n - rank


class _ReducedLadder:
    """Type-I detection for axis rank-one G via the reduced eigenproblem.

    Type-I eigenvectors have last coordinate (the coupling axis) zero, so the
    head block w solves A11 w = mu M11 w with mu = lambda^2, subject to the
    deleted row closing: mu*(M[e,:] w) - A[e,:] w = 0.  Degenerate mu groups
    pass as a block: the row condition is a single linear functional, so the
    passing dimension is the group size minus one when the functional does
    not vanish on the group span.
    """

    def __init__(self, spec, eta):
        k = spec.rank_one.e_index
        keep = [i for i in range(spec.n) if i != k]
        self.ok = False
        m11 = spec.m[np.ix_(keep, keep)]
        if m11.size == 0:
            return
        if float(sla.eigvalsh(m11, check_finite=False)[0]) <= 1e-12 * max(1.0, spec.norm_m):
            return
        a11 = spec.a[np.ix_(keep, keep)]
        self.mrow = spec.m[k, keep]
        self.arow = spec.a[k, keep]
        mus, w = sla.eigh(a11, m11, check_finite=False)
        self.mus = mus
        self.w = w
        self.ok = True
        self.mu_floor = 1e-9 * max(1.0, float(np.max(np.abs(mus))))

    def type1_assignments(self):
        """Yield (lam, dim) pairs; lam = +-sqrt(mu) with the zero collapsed."""
        resid = self.mus * (self.mrow @ self.w) - self.arow @ self.w
        wnorm = np.linalg.norm(self.w, axis=0)
        rscale = (np.abs(self.mus) * np.linalg.norm(self.mrow)
                  + np.linalg.norm(self.arow)) * wnorm
        out = []
        i = 0
        nmu = len(self.mus)
        while i < nmu:
            j = i + 1
            gtol = 1e-6 * max(1.0, abs(self.mus[i]))
            while j < nmu and abs(self.mus[j] - self.mus[i]) <= gtol:
                j += 1
            group = range(i, j)
            hard_fail = any(
                abs(resid[t]) > 1e-8 * max(rscale[t], np.finfo(float).tiny)
                for t in group
            )
            dim = (j - i) - (1 if hard_fail else 0)
            if dim > 0:
                mu = float(np.mean(self.mus[i:j]))
                if abs(mu) <= self.mu_floor:
                    out.append((0.0, dim))
                elif mu > 0:
                    out.append((np.sqrt(mu), dim))
                    out.append((-np.sqrt(mu), dim))
                else:
                    out.append((1j * np.sqrt(-mu), dim))
                    out.append((-1j * np.sqrt(-mu), dim))
            i = j
        return out


def _fill_types(spec, eta, records, type_route):
    classified = spec.rank_one is not None and spec.ker_ma_trivial
    if not classified:
        for rec in records:
            rec.type1_mult = 0
            rec.type2_mult = rec.alg_mult
            rec.types_classified = False
        return

    zero_tol = 1e-7 * spec.scale
    route = type_route
    if route == "auto":
        route = "reduced" if spec.n >= 60 else "stacked"
    ladder = None
    if route == "reduced":
        ladder = _ReducedLadder(spec, eta)
        if not ladder.ok:
            route = "stacked"

    if route == "reduced":
        for rec in records:
            rec.type1_mult = 0
        for lam, dim in ladder.type1_assignments():
            best = None
            for rec in records:
                d = abs(rec.lam - lam)
                if d <= 1e-6 * max(1.0, abs(lam)) and (best is None or d < best[0]):
                    best = (d, rec)
            if best is not None:
                best[1].type1_mult += dim
        for rec in records:
            rec.type1_mult = min(rec.type1_mult, rec.alg_mult)
            rec.type2_mult = rec.alg_mult - rec.type1_mult
            rec.zero_flagged = abs(rec.lam) <= zero_tol
    else:
        for rec in records:
            if abs(rec.lam) <= zero_tol:
                # at 0 the eta-independent kernel is ker A ∩ ker G
                m0 = _classify_stacked(spec, 0.0, 0.0, 0.0)
                rec.zero_flagged = True
            else:
                m0 = _classify_stacked(spec, rec.lam, eta, rec._spread)
            rec.type1_mult = min(m0, rec.alg_mult)
            rec.type2_mult = rec.alg_mult - rec.type1_mult


def spectrum(spec, eta, type_route="auto", shift=None):
    """All finite eigenvalues of L(., eta) with multiplicities and types.

    type_route: "auto" picks the reduced ladder for large axis-coupled
    problems and the stacked-rank route otherwise; "stacked"/"reduced"
    force one (testing hook).
    """
    if not (-1e-12 <= eta <= 1.0 + 1e-12):
        raise InvalidInput("eta must lie in [0, 1], got %r" % (eta,))
    eta = min(max(eta, 0.0), 1.0)
    n = spec.n
    if shift is None:
        sigma = choose_shift(spec, eta)
    else:
        sigma = shift
        thresh = 1e-8 * max(spec.spec_norm, np.finfo(float).tiny)
        if linalg.smallest_singular_value(evaluate(spec, sigma, eta)) <= thresh:
            raise ShiftExhausted("supplied shift leaves L(sigma, eta) singular")

    l0 = evaluate(spec, sigma, eta)
    p1 = 2.0 * sigma * spec.m - eta * spec.g
    p2 = spec.m
    lu, piv = sla.lu_factor(l0, check_finite=False)
    # one refinement pass; the companion blocks must be accurate enough that
    # defective clusters split below the clustering gap
    b2 = sla.lu_solve((lu, piv), p2, check_finite=False)
    b2 += sla.lu_solve((lu, piv), p2 - l0 @ b2, check_finite=False)
    b1 = sla.lu_solve((lu, piv), p1, check_finite=False)
    b1 += sla.lu_solve((lu, piv), p1 - l0 @ b1, check_finite=False)

    comp = np.zeros((2 * n, 2 * n))
    comp[:n, n:] = np.eye(n)
    comp[n:, :n] = -b2
    comp[n:, n:] = -b1
    dec = linalg.eigen_standard(comp)
    mus = dec.values
    vecs = dec.vectors

    tau_inf = 1e-10 * max(1.0, spec.spec_norm)
    # defective chains at infinity split at sqrt(eps) under rounding, which
    # lands above tau_inf; catch those by their vanishing mass content
    tau_soft = 1e-7 * max(1.0, spec.spec_norm)
    m_floor = 1e-6 * spec.norm_m
    finite_idx = []
    for i in range(2 * n):
        mu = abs(mus[i])
        if mu < tau_inf:
            continue
        if mu < tau_soft:
            v = vecs[:n, i]
            nv = np.linalg.norm(v)
            if nv > 0.0 and np.linalg.norm(spec.m @ v) <= m_floor * nv:
                continue
        finite_idx.append(i)
    discarded = 2 * n - len(finite_idx)
    lams = np.array([sigma + 1.0 / mus[i] for i in finite_idx])

    records = []
    for members in _cluster_points(lams, zero_tol=1e-7 * spec.scale):
        group = lams[members]
        rep = complex(np.mean(group))
        if abs(rep.imag) == 0.0:
            rep = complex(rep.real, 0.0)
        alg = len(members)
        spread = float(np.max(np.abs(group - rep))) if alg > 1 else 0.0
        if alg == 1:
            vec = vecs[:n, finite_idx[members[0]]]
            nrm = np.linalg.norm(vec)
            vec = vec / nrm if nrm > 0 else vec
            if np.max(np.abs(vec.imag)) <= 1e-14 * max(1.0, np.max(np.abs(vec.real))):
                vec = vec.real.astype(complex)
            resid = float(np.linalg.norm(evaluate(spec, rep, eta) @ vec))
            geo = 1
            kvecs = vec.reshape(n, 1)
        else:
            lmat = evaluate(spec, rep, eta)
            u, s, vh = sla.svd(lmat, check_finite=False)
            tol = _kernel_tol(spec, rep, eta, spread, float(s[0]), n)
            rank = int(np.count_nonzero(s > tol))
            geo = max(1, min(n - rank, alg))
            kvecs = vh[n - geo:].conj().T
            resid = float(s[n - geo])
        rec = EigenRecord(
            lam=rep, alg_mult=alg, geo_mult=geo, type1_mult=0,
            type2_mult=alg, vectors=kvecs, residual=resid,
        )
        rec._spread = spread
        records.append(rec)

    records.sort(key=lambda r: (r.lam.real, r.lam.imag))
    _fill_types(spec, eta, records, type_route)
    return SpectrumResult(
        eta=eta,
        records=records,
        n_finite=int(sum(r.alg_mult for r in records)),
        discarded_infinite=int(discarded),
        scale=spec.scale,
    )


def geometric_multiplicity(spec, lam, eta):
    """n - rank(L(lam, eta)) with the automatic scale-invariant tolerance."""
    return spec.n - linalg.rank_with_tol(evaluate(spec, lam, eta))


def is_semisimple(spec, lam, eta):
    result = spectrum(spec, eta)
    rec = result.find(lam)
    if rec is None:
        raise NotAnEigenvalue("%r is not an eigenvalue at eta=%r" % (lam, eta))
    return rec.alg_mult == rec.geo_mult


def classify_type(spec, record, eta=1.0):
    """(type1_mult, type2_mult) for one eigenvalue record.

    type1_mult = dim(ker L(lam) ∩ ker G), which is independent of eta; for
    lam = 0 the split is reported but the identity with the persistent
    multiplicity is not asserted (the record should carry zero_flagged).
    """
    if spec.rank_one is None:
        raise InvalidInput("type classification requires the rank-one flag")
    if not spec.ker_ma_trivial:
        raise PreconditionKerMA("ker M ∩ ker A must be trivial")
    lam = record.lam
    spread = getattr(record, "_spread", 0.0)
    if abs(lam) <= 1e-7 * spec.scale:
        m0 = _classify_stacked(spec, 0.0, 0.0, 0.0)
    else:
        m0 = _classify_stacked(spec, lam, eta, spread)
    t1 = min(m0, record.alg_mult)
    return t1, record.alg_mult - t1


@dataclass
class Region:
    """Closed rectangle 0 <= Re <= re_max, |Im| <= im_abs."""

    re_max: float
    im_abs: float

    def contains(self, lam, slack=1e-8):
        return (-slack <= lam.real <= self.re_max + slack
                and abs(lam.imag) <= self.im_abs + slack)


def nonreal_region(spec, eta):
    """Rectangle confining nonreal eigenvalues when M >= m I with m > 0."""
    m = spec.m_mass
    if m <= 1e-10 * max(1.0, spec.norm_m):
        raise MassNotDefinite("lambda_min(M) = %.3e" % m)
    return Region(re_max=eta * spec.g_top / (2.0 * m),
                  im_abs=float(np.sqrt(spec.beta / m)))


def nonsimple_real_interval(spec):
    """Interval [0, g_top/(2 m)] containing every nonsimple real eigenvalue."""
    m = spec.m_mass
    if m <= 1e-10 * max(1.0, spec.norm_m):
        raise MassNotDefinite("lambda_min(M) = %.3e" % m)
    return (0.0, spec.g_top / (2.0 * m))

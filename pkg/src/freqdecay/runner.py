"""Experiment orchestration: mesh, solve, profile, verify, emit.

Each subcommand runs a fixed stage sequence over one parsed configuration,
writes CSVs (17 significant digits, re-parseable exactly), optional SVG
plots, and a JSON manifest echoing the config with content digests of every
output file.  Any stage error removes partial outputs and maps to exit code
1; a verification failure maps to exit code 2.
"""

from __future__ import annotations

import hashlib
import json
import os
import time

import numpy as np

from . import __version__, coefficients, decay, fem, oracle, spectral, svgplot
from .config import parse_config  # noqa: F401  (re-exported for the CLI)
from .errors import ConfigError, FreqdecayError
from .errors import SpectralError
from .geometry import build_domain
from .meshing import build_mesh, write_mesh_text

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VERIFY_FAIL = 2


def _g17(x):
    return f"{float(x):.17g}"


class _Emitter:
    """Tracks created files so failures can clean up and digests are recorded."""

    def __init__(self, out_dir):
        self.out_dir = out_dir
        self.files = []
        os.makedirs(out_dir, exist_ok=True)

    def path(self, name):
        self.files.append(name)
        return os.path.join(self.out_dir, name)

    def write_csv(self, name, header, rows):
        with open(self.path(name), "w") as f:
            f.write(header + "\n")
            for row in rows:
                f.write(",".join(row) + "\n")

    def digests(self):
        out = []
        for name in self.files:
            h = hashlib.sha256()
            with open(os.path.join(self.out_dir, name), "rb") as f:
                h.update(f.read())
            out.append({"path": name, "sha256": h.hexdigest()})
        return out

    def cleanup(self):
        for name in self.files:
            try:
                os.remove(os.path.join(self.out_dir, name))
            except OSError:
                pass


class Pipeline:
    """Lazily evaluated stage graph shared by the subcommands."""

    def __init__(self, cfg, quiet=False):
        self.cfg = cfg
        self.quiet = quiet
        self.timings = {}
        self._cache = {}

    def _say(self, msg):
        if not self.quiet:
            print(msg)

    def _stage(self, name, fn):
        if name not in self._cache:
            label = name if isinstance(name, str) else "_".join(str(p) for p in name)
            t0 = time.perf_counter()
            self._cache[name] = fn()
            dt = time.perf_counter() - t0
            self.timings[label] = self.timings.get(label, 0.0) + dt
            self._say(f"[{label}] {dt:.2f}s")
        return self._cache[name]

    # -- stages -----------------------------------------------------------

    @property
    def domain(self):
        return self._stage("domain", lambda: build_domain(
            self.cfg.domain_family, self.cfg.domain_params))

    @property
    def mesh(self):
        return self._stage("mesh", lambda: build_mesh(self.domain, self.cfg.h))

    def _make_field(self, spec):
        catalog, params = spec
        if catalog == "blended":
            weight, first, second = params
            return coefficients.blended(weight, self._make_field(first),
                                        self._make_field(second))
        maker = {
            "constant": coefficients.constant_scalar,
            "radial_bump": coefficients.radial_bump,
            "linear_ramp": coefficients.linear_ramp,
            "constant_tensor": coefficients.constant_tensor,
            "rotated_anisotropic": coefficients.rotated_anisotropic,
        }[catalog]
        return maker(*params)

    @property
    def raw_fields(self):
        return self._stage("fields", lambda: (
            self._make_field(self.cfg.conductivity),
            self._make_field(self.cfg.metric)))

    @property
    def problem_pair(self):
        """(gamma, G) after the tensor reduction and optional tube modification."""
        def build():
            cond, met = self.raw_fields
            if cond.kind == "tensor":
                cond, met = coefficients.reduce_to_scalar(cond, met,
                                                          domain=self.domain)
            if self.cfg.aks:
                met = coefficients.aks_modify(self.domain, met)
            return cond, met
        return self._stage("problem_pair", build)

    @property
    def matrices(self):
        return self._stage("assemble", lambda: fem.assemble(
            self.mesh, *self.problem_pair))

    @property
    def euclid_matrices(self):
        def build():
            gamma = coefficients.constant_scalar(1.0)
            met = coefficients.constant_tensor(1.0, 0.0, 1.0)
            return fem.assemble(self.mesh, gamma, met)
        return self._stage("assemble_euclid", build)

    @property
    def euclid_dtn(self):
        return self._stage("dtn_euclid",
                           lambda: spectral.dtn_matrix(self.euclid_matrices))

    @property
    def euclid_basis(self):
        def build():
            m = min(len(self.mesh.boundary_cycle), spectral.DEFAULT_BASIS_SIZE)
            return spectral.steklov_basis(self.euclid_dtn,
                                          self.euclid_matrices.B_e_bb, m,
                                          tag="euclid")
        return self._stage("steklov_euclid", build)

    @property
    def problem_dtn(self):
        return self._stage("dtn", lambda: spectral.dtn_matrix(self.matrices))

    @property
    def problem_basis(self):
        def build():
            need = max((n for k, n in self.cfg.data if k == "steklov"), default=0)
            m = max(self.cfg.steklov_m, need + 1)
            m = min(m, len(self.mesh.boundary_cycle))
            return spectral.steklov_basis(self.problem_dtn,
                                          self.matrices.B_e_bb, m, tag="problem")
        return self._stage("steklov", build)

    def datum(self, kind, n):
        if kind in ("cos", "sin"):
            return fem.fourier_datum(self.mesh, n, kind)
        basis = self.problem_basis
        if n >= basis.count:
            raise SpectralError(f"steklov datum index {n} beyond the "
                                f"{basis.count}-mode basis")
        return fem.BoundaryDatum(values=basis.modes[:, n], mean_zero=True,
                                 descriptor=("steklov", n))

    def profile(self, kind, n):
        key = ("profile", kind, n)

        def build():
            gamma, met = self.problem_pair
            u = fem.solve_dirichlet(self.matrices, self.mesh, self.datum(kind, n))
            return decay.decay_profile(self.mesh, gamma, met, u,
                                       self.cfg.d_values())
        return self._stage(key, build)

    def frequencies(self, kind, n):
        f = self.datum(kind, n)
        phi = spectral.frequency(self.euclid_matrices, self.mesh, f,
                                 dtn=self.euclid_dtn)
        try:
            phi1 = spectral.low_frequency(self.euclid_basis,
                                          self.euclid_matrices.B_e_bb, f)
        except FreqdecayError:
            phi1 = float("nan")
        return phi, phi1


def _label(kind, n):
    return f"{kind}{n}"


def _boundary_angles(mesh):
    lengths = mesh.boundary_edge_lengths
    per = float(lengths.sum())
    s = np.concatenate([[0.0], np.cumsum(lengths[:-1])])
    return 2.0 * np.pi * s / per


def run(cfg, subcommand, out_dir, quiet=False):
    """Execute one subcommand; returns the process exit code."""
    emit = _Emitter(out_dir)
    pipe = Pipeline(cfg, quiet=quiet)
    t_start = time.perf_counter()
    try:
        code = _dispatch(cfg, subcommand, pipe, emit)
    except FreqdecayError as exc:
        emit.cleanup()
        stage = max(pipe.timings, key=pipe.timings.get) if pipe.timings else "setup"
        print(f"error [{stage}]: {exc}")
        return EXIT_ERROR
    manifest = {
        "artifact": "freqdecay",
        "version": __version__,
        "subcommand": subcommand,
        "config": cfg.serialize(),
        "wall_clock": {str(k): round(v, 6) for k, v in pipe.timings.items()},
        "total_seconds": round(time.perf_counter() - t_start, 6),
        "outputs": emit.digests(),
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return code


def _dispatch(cfg, subcommand, pipe, emit):
    handlers = {
        "mesh": _run_mesh,
        "steklov": _run_steklov,
        "frequency": _run_frequency,
        "decay": _run_decay,
        "verify": _run_verify,
        "penetration": _run_penetration,
        "oracle": _run_oracle,
        "plot": _run_plot,
    }
    if subcommand not in handlers:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    return handlers[subcommand](cfg, pipe, emit)


def _run_mesh(cfg, pipe, emit):
    write_mesh_text(pipe.mesh, emit.path("mesh.txt"))
    return EXIT_OK


def _run_steklov(cfg, pipe, emit):
    basis = pipe.problem_basis
    emit.write_csv("steklov.csv", "k,mu_k",
                   ([str(k), _g17(mu)] for k, mu in enumerate(basis.mu)))
    if cfg.mode_traces:
        ang = _boundary_angles(pipe.mesh)
        for k in range(basis.count):
            emit.write_csv(f"mode_{k}.csv", "theta,value",
                           ([_g17(t), _g17(v)]
                            for t, v in zip(ang, basis.modes[:, k])))
    return EXIT_OK


def _run_frequency(cfg, pipe, emit):
    rows = []
    for kind, n in cfg.data:
        f = pipe.datum(kind, n)
        rep_phi = spectral.frequency(pipe.euclid_matrices, pipe.mesh, f,
                                     dtn=pipe.euclid_dtn)
        try:
            rep = spectral.frequency_report(pipe.euclid_matrices, pipe.mesh, f,
                                            pipe.euclid_dtn, pipe.euclid_basis)
            row = [rep.Phi, rep.Phi1, rep.l2, rep.semi_h12, rep.dual]
        except FreqdecayError:
            fv = f.values
            l2 = float(fv @ (pipe.euclid_matrices.B_e_bb @ fv))
            row = [rep_phi, float("nan"), l2, rep_phi * l2, float("nan")]
        rows.append([_label(kind, n)] + [_g17(v) for v in row])
    emit.write_csv("frequency.csv", "datum,phi,phi1,l2,semi_h12,dual", rows)
    return EXIT_OK


def _profile_rows(prof):
    for i, d in enumerate(prof.d_grid):
        yield [_g17(d), _g17(prof.D[i]), _g17(prof.H[i]), _g17(prof.E[i]),
               _g17(prof.T[i]), _g17(prof.N[i]), _g17(prof.F[i]),
               _g17(prof.K[i]), _g17(prof.K1[i])]


def _run_decay(cfg, pipe, emit):
    if not cfg.data:
        raise ConfigError("decay requires at least one datum")
    for kind, n in cfg.data:
        prof = pipe.profile(kind, n)
        emit.write_csv(f"decay_{_label(kind, n)}.csv", "d,D,H,E,T,N,F,K,K1",
                       _profile_rows(prof))
    return EXIT_OK


def _run_verify(cfg, pipe, emit):
    if not cfg.data:
        raise ConfigError("verify requires at least one datum")
    rows = []
    all_pass = True
    for kind, n in cfg.data:
        prof = pipe.profile(kind, n)
        phi, phi1 = pipe.frequencies(kind, n)
        rep = decay.verify_decay([(prof, phi, phi1)])
        ok = rep.pass_D and rep.pass_H and rep.pass_cor
        all_pass &= ok
        rows.append([_label(kind, n), _g17(phi), _g17(phi1),
                     _g17(rep.max_ratio_D), _g17(rep.max_ratio_H),
                     _g17(rep.max_ratio_cor),
                     str(int(rep.pass_D)), str(int(rep.pass_H)),
                     str(int(rep.pass_cor))])
    emit.write_csv("verify.csv",
                   "datum,phi,phi1,max_ratio_D,max_ratio_H,max_ratio_cor,"
                   "pass_D,pass_H,pass_cor", rows)
    return EXIT_OK if all_pass else EXIT_VERIFY_FAIL


def _run_penetration(cfg, pipe, emit):
    if not cfg.penetration_n or not cfg.penetration_d:
        raise ConfigError("penetration requires penetration_n and penetration_d")
    cond, met = pipe.raw_fields
    rows = []
    for n in cfg.penetration_n:
        nmax = cfg.penetration_nmax or (n + 16)
        sols = decay.penetration_solutions(pipe.mesh, cond, met, n, nmax,
                                           matrices=pipe.matrices
                                           if cond.kind == "scalar" else None)
        for d in cfg.penetration_d:
            xi = decay.penetration(pipe.mesh, cond, met, n, d, n_max=nmax,
                                   solutions=sols)
            rows.append([str(n), _g17(d), _g17(xi), _g17(xi * d * n)])
    emit.write_csv("penetration.csv", "n,d,xi,xi_times_dn", rows)
    return EXIT_OK


def _run_oracle(cfg, pipe, emit):
    modes = [n for kind, n in cfg.data if kind == "cos" and n >= 1] or [1]
    for n in modes:
        rows = []
        for d in pipe.cfg.d_values():
            rec = oracle.disk_oracle(n, float(d))
            rows.append([_g17(v) for v in
                         (d, rec.D, rec.H, rec.E, rec.T, rec.N, rec.F,
                          rec.K, rec.K1)])
        emit.write_csv(f"oracle_cos{n}.csv", "d,D,H,E,T,N,F,K,K1", rows)
    return EXIT_OK


def _run_plot(cfg, pipe, emit):
    if not cfg.data:
        raise ConfigError("plot requires at least one datum")
    for kind, n in cfg.data:
        prof = pipe.profile(kind, n)
        phi, phi1 = pipe.frequencies(kind, n)
        d = prof.d_grid
        curves = [
            ("log10 D/D(0)", d, np.log10(prof.D / prof.D[0]), False),
            ("log10 H/H(0)", d, np.log10(prof.H / prof.H[0]), False),
            ("log10 h(d*Phi)", d, np.log10(decay.h_fun(d * phi)), True),
        ]
        if np.isfinite(phi1):
            curves.append(("log10 h(d*Phi1)", d,
                           np.log10(decay.h_fun(d * phi1)), True))
        svgplot.line_chart(emit.path(f"decay_{_label(kind, n)}.svg"),
                           f"interior decay, datum {_label(kind, n)}",
                           "d", "log10 relative decay", curves)
    return EXIT_OK

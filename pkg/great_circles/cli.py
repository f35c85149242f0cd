"""Command line front end.

Usage::

    great-circles fibration build A B C D
    great-circles fibration check A B C D [--force]
    great-circles grassmann A B C D
    great-circles curvature A B C D --gamma G --beta B
    great-circles volume A N [--panels P --nodes K]
    great-circles berger SMIN SMAX STEPS

``A B C D`` are the entries of ``F = [[A, B], [C, D]]``. Every command
accepts ``--samples``, ``--seed``, ``--format``, ``--out``, ``-v`` and one
``--tol.<name>`` option per entry of :data:`great_circles.constants.TOLERANCES`.

Exit codes: 0 on success, 1 on usage errors, 2 when the input violates a
geometric precondition and 3 when a verification fails.

"""

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile

import numpy as np

from great_circles import constants, curvature, fibration, grassmann, models, volume
from great_circles.linalg import GeometryError

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_GEOMETRY = 2
EXIT_VERIFICATION = 3


class CliConfig(object):
    """Settings shared by all commands.

    Attributes:
        seed (int): Seed of every sampler.
        tolerances (dict): Tolerance name to value, defaults overridden.
        output_format (str): ``"json"`` or ``"csv"``.
        output_path (str): Output file, or ``None`` for standard output.

    """

    def __init__(self, seed=constants.DEFAULT_SEED, tolerances=None, output_format="json", output_path=None):
        """Validate the settings.

        Raises:
            UsageError: on unknown or non-positive tolerances, or an unknown
                format.

        """
        merged = dict(constants.TOLERANCES)
        for name, value in (tolerances or {}).items():
            if name not in merged:
                raise UsageError("unknown tolerance {}".format(name))
            if not value > 0.0:
                raise UsageError("tolerance {} must be positive, got {}".format(name, value))
            merged[name] = float(value)
        if output_format not in ("json", "csv"):
            raise UsageError("format must be json or csv, got {}".format(output_format))
        self.seed = seed
        self.tolerances = merged
        self.output_format = output_format
        self.output_path = output_path

    @classmethod
    def from_args(cls, args):
        """Build the configuration of a parsed command line."""
        overrides = {}
        for name in constants.TOLERANCES:
            value = getattr(args, "tol_" + name)
            if value is not None:
                overrides[name] = value
        output_format = args.output_format or args.default_format
        if output_format == "csv" and not args.csv_allowed:
            raise UsageError("{} has no csv output".format(args.command_name))
        return cls(seed=args.seed, tolerances=overrides, output_format=output_format,
                   output_path=args.output_path)

    def tol(self, name):
        """Return the tolerance called ``name``."""
        return self.tolerances[name]


class CliParser(argparse.ArgumentParser):
    """Argument parser that raises :class:`UsageError` instead of exiting."""

    def error(self, message):  # noqa: D102
        raise UsageError(message)


def _common_options():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--samples", type=int, default=None, help="Number of samples.")
    common.add_argument("--seed", type=int, default=constants.DEFAULT_SEED, help="Sampling seed (default: 42).")
    common.add_argument("--format", choices=("json", "csv"), default=None, dest="output_format",
                        help="Output format.")
    common.add_argument("--out", default=None, dest="output_path", help="Output file (default: standard output).")
    common.add_argument("-v", "--verbose", action="count", default=0, help="Log INFO (-v) or DEBUG (-vv).")
    for name in sorted(constants.TOLERANCES):
        common.add_argument("--tol.{}".format(name), type=float, default=None, dest="tol_" + name, metavar="TOL",
                            help="Override the {} tolerance (default: {:g}).".format(name, constants.TOLERANCES[name]))
    return common


def _add_phi_arguments(parser):
    for name in ("a", "b", "c", "d"):
        parser.add_argument(name, type=float, help="Entry {} of F = [[a, b], [c, d]].".format(name))


def build_parser():
    """Return the argument parser of the ``great-circles`` command."""
    common = _common_options()
    parser = CliParser(prog="great-circles", description="Great circle fibrations of the 3-sphere.")
    commands = parser.add_subparsers(dest="command")
    commands.required = True

    fibration_parser = commands.add_parser("fibration", help="Build or check a skew-Hopf fibration.")
    actions = fibration_parser.add_subparsers(dest="action")
    actions.required = True
    build = actions.add_parser("build", parents=[common], help="Convert F to its complex structure.")
    _add_phi_arguments(build)
    build.set_defaults(handler=cmd_fibration_build, command_name="fibration build", default_format="json",
                       csv_allowed=False, default_samples=None)
    check = actions.add_parser("check", parents=[common], help="Verify that fibers do not intersect.")
    _add_phi_arguments(check)
    check.add_argument("--force", action="store_true", help="Accept F with real eigenvalues.")
    check.set_defaults(handler=cmd_fibration_check, command_name="fibration check", default_format="json",
                       csv_allowed=False, default_samples=1000)

    grassmann_parser = commands.add_parser("grassmann", parents=[common], help="Analyse the base surface.")
    _add_phi_arguments(grassmann_parser)
    grassmann_parser.set_defaults(handler=cmd_grassmann, command_name="grassmann", default_format="json",
                                  csv_allowed=True, default_samples=constants.SURFACE_SAMPLES)

    curvature_parser = commands.add_parser("curvature", parents=[common], help="Build and check the tensor of F.")
    _add_phi_arguments(curvature_parser)
    curvature_parser.add_argument("--gamma", type=float, required=True, help="Negative parameter gamma.")
    curvature_parser.add_argument("--beta", type=float, required=True, help="Negative parameter beta.")
    curvature_parser.set_defaults(handler=cmd_curvature, command_name="curvature", default_format="json",
                                  csv_allowed=False, default_samples=100)

    volume_parser = commands.add_parser("volume", parents=[common], help="Volume constants of KP^n.")
    volume_parser.add_argument("a", type=int, help="Dimension of the base field: 1, 2, 4 or 8.")
    volume_parser.add_argument("n", type=int, help="Projective dimension.")
    volume_parser.add_argument("--panels", type=int, default=constants.QUADRATURE_PANELS)
    volume_parser.add_argument("--nodes", type=int, default=constants.QUADRATURE_NODES)
    volume_parser.set_defaults(handler=cmd_volume, command_name="volume", default_format="json",
                               csv_allowed=False, default_samples=None)

    berger_parser = commands.add_parser("berger", parents=[common], help="Sweep Berger metrics.")
    berger_parser.add_argument("smin", type=float)
    berger_parser.add_argument("smax", type=float)
    berger_parser.add_argument("steps", type=int)
    berger_parser.set_defaults(handler=cmd_berger, command_name="berger", default_format="csv",
                               csv_allowed=True, default_samples=None)
    return parser


def _phi_matrix(args):
    return np.array([[args.a, args.b], [args.c, args.d]])


def _samples(args):
    return args.samples if args.samples is not None else args.default_samples


def _emit(text, path):
    """Write ``text`` to ``path`` atomically, or to standard output."""
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    handle, temporary = tempfile.mkstemp(dir=directory, prefix=".great-circles-", suffix=".tmp")
    try:
        with io.open(handle, "w", newline="") as stream:
            stream.write(text)
        os.replace(temporary, path)
    except BaseException:
        if os.path.exists(temporary):
            os.unlink(temporary)
        raise


def write_json(payload, config):
    """Serialize ``payload`` with the schema version and emit it."""
    document = models.plain(payload)
    document["schemaVersion"] = constants.SCHEMA_VERSION
    _emit(json.dumps(document, sort_keys=True, indent=2) + "\n", config.output_path)


def write_csv(rows, config):
    """Emit CSV rows."""
    buffer = io.StringIO()
    csv.writer(buffer, lineterminator="\n").writerows(rows)
    _emit(buffer.getvalue(), config.output_path)


def cmd_fibration_build(args, config):
    """Convert ``F`` to its complex structure and back."""
    phi = fibration.PhiMap(_phi_matrix(args))
    J = fibration.phi_to_structure(phi)
    error = float(np.max(np.abs(fibration.structure_to_phi(J).matrix - phi.matrix)))
    write_json({"F": phi.matrix, "D": phi.discriminant, "J": J.matrix, "roundTripError": error}, config)
    return EXIT_OK if error <= config.tol("roundTrip") else EXIT_VERIFICATION


def cmd_fibration_check(args, config):
    """Verify the fibration of ``F`` and search for orthogonal fibers."""
    F = _phi_matrix(args)
    phi = fibration.PhiMap.forced(F) if args.force else fibration.PhiMap(F)
    f = fibration.GreatCircleFibration.special_basis(phi)
    report = fibration.verify_fibration(f, _samples(args), seed=config.seed,
                                        separation_tol=config.tol("separation"))
    payload = report.to_json()
    payload["orthogonalResidual"] = None
    if f.structure is not None:
        _, _, payload["orthogonalResidual"] = fibration.orthogonal_fiber_pair(f, tol=config.tol("orthogonal"))
    write_json(payload, config)
    return EXIT_OK if report.clean else EXIT_VERIFICATION


def cmd_grassmann(args, config):
    """Sample the base surface and fit its decomposition.

    JSON output carries the samples together with both reports; CSV output
    carries the samples only.

    """
    f = fibration.GreatCircleFibration.special_basis(_phi_matrix(args))
    surface = grassmann.base_surface(f, _samples(args), seed=config.seed, dedup_tol=config.tol("coincidence"))
    domain = grassmann.graph_domain(surface)
    lipschitz = grassmann.lipschitz_check(surface, domain)
    decomposition = grassmann.gage_decompose(surface, domain, seed=config.seed, fit_tol=config.tol("fit"),
                                             rank_tol=config.tol("rank"))
    if config.output_format == "csv":
        write_csv(surface.csv_rows(), config)
    else:
        write_json({"F": f.phi.matrix, "points": len(surface), "surface": surface.to_json(),
                    "lipschitz": lipschitz.to_json(), "decomposition": decomposition.to_json()}, config)
    passed = lipschitz.passed(config.tol("lipschitz")) and decomposition.residual < config.tol("fit")
    return EXIT_OK if passed else EXIT_VERIFICATION


def cmd_curvature(args, config):
    """Build the tensor of ``F``, check its properties and recover ``F``."""
    phi = fibration.PhiMap(_phi_matrix(args))
    R = curvature.build_tensor(phi, args.gamma, args.beta)
    report = curvature.verify_r2_r3(R, phi, _samples(args), seed=config.seed,
                                    sectional_tol=config.tol("sectional"), angle_tol=config.tol("angle"))
    recovered = curvature.recover_fibration(R, kernel_tol=config.tol("kernel"))
    error = float(np.max(np.abs(recovered.matrix - phi.matrix)))
    write_json({"F": phi.matrix, "gamma": args.gamma, "beta": args.beta, "tensor": R.to_json(),
                "properties": report.to_json(), "recoveredF": recovered.matrix, "roundTripError": error},
               config)
    return EXIT_OK if report.passed and error <= config.tol("recovery") else EXIT_VERIFICATION


def cmd_volume(args, config):
    """Compute the volume record of ``KP^n``."""
    params = volume.ModelSpaceParams(args.a, args.n)
    cfg = volume.QuadratureConfig(args.panels, args.nodes, config.tol("quadrature"))
    record = volume.volume_record(params, cfg)
    write_json(record.to_json(), config)
    passed = (record.beta_relative_error < config.tol("beta") and
              record.unit_bundle_residual < config.tol("unitBundle") and
              (record.holder_residual is None or abs(record.holder_residual) < config.tol("holder")))
    return EXIT_OK if passed else EXIT_VERIFICATION


def cmd_berger(args, config):
    """Sweep Berger metrics between ``smin`` and ``smax``."""
    reports = volume.berger_sweep(args.smin, args.smax, args.steps)
    if config.output_format == "csv":
        write_csv([models.BergerMetricReport.csv_header] + [r.csv_row() for r in reports], config)
    else:
        write_json({"reports": [r.to_json() for r in reports]}, config)
    return EXIT_OK


def main(argv=None):
    """Run the command line and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = CliConfig.from_args(args)
    except UsageError as e:
        sys.stderr.write("great-circles: error: {}\n".format(e))
        return EXIT_USAGE
    except SystemExit as e:
        return e.code or EXIT_OK

    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.handler(args, config)
    except GeometryError as e:
        log.error("%s: %s", type(e).__name__, e)
        return EXIT_GEOMETRY
    except ValueError as e:
        sys.stderr.write("great-circles: error: {}\n".format(e))
        return EXIT_USAGE


class UsageError(Exception):
    """Raised for malformed command lines."""

    pass

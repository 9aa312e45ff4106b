"""Command-line entry point: verification suites, homology tables, evaluation, export.

Exit status is 0 when every check passes, 1 when a verification fails
or a library error interrupts it, and 2 for usage or configuration
errors. Bounds default to the HOMALG_* environment variables (see
config.BoundsConfig); flags override them.
"""
import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import algebra as algebra_module
import graph_core
from ainfty import differential as forest_differential
from ainfty import planar_forests, verify_l_squared, verify_m3_identity
from algebra import FrobeniusAlgebraSpec, builtin, validate, verify_frobenius
from chain_complex import VerificationReport, homology
from config import BoundsConfig, ValidatedConfig
from cosimplicial import (OneManifold, configuration_cosimplicial_set, identity_failures, simplex_splitting,
                          verify_classification, verify_complete_split, verify_concentration,
                          verify_inj_contraction)
from errors import AssemblyError, UsageError
from formal_ops import NatTruncation, verify_capprop, verify_nat_square
from hochschild import (HochschildComplexSpec, build_hochschild, homology_table, quotient_is_chain_map,
                        verify_cap_identity, verify_unit_homotopies)
from logger import get_logger, log_context, setup_logging
from sullivan import (diagram_to_json, differential_faces, from_bw, is_cycle, mu_graph, random_sullivan_graph,
                      sd_differential, t_graph)
from tqft_action import (LabeledDiagram, chain_map_report, class_record, evaluate, homology_action_report,
                         mu_action_report)

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

CONVENTIONS = {
    'orientation': 'ordered vertices and half-edges with a sign; blow-up puts v1^v2^h1^h2 in front',
    'chain_degree': 'length - 1 + internal degree',
    'cochain_sign': '(-1)^(e+q+1+e|a1|) a1 D + sum (-1)^(i+q+1+e) D(..a_i a_i+1..) + (-1)^e D a_q+1',
    'cap_sign': '(-1)^((p + sum_{i>=1}|a_i|) e + p q)',
    'sullivan_sign': 'blocks a2^a3^v^a1 per black vertex, then white generators in canonical order',
}

ALGEBRA_SUITE = ('dual', 'sphere2', 'sphere3')


@dataclass
class RunConfig:  # pylint: disable=too-many-instance-attributes
    """Resolved settings for one run.

    Attributes:
        command: Subcommand name
        algebra: Built-in algebra name or path to a JSON specification
        n_max: Hochschild word-length truncation
        q_max: Cochain arity truncation
        cosimplicial_q_max: Top level of the configuration cosimplicial sets
        j_max: Input-arity truncation of the formal-operations complex
        k_max: Output-arity truncation of the formal-operations complex
        g_max: Largest genus of the mu_g / t_g suites
        seed: Seed of every randomized suite
        coefficients: 'Z' or 'Q'
        output_format: 'text' or 'json'
        options: Subcommand-specific values
    """
    command: str
    algebra: str = 'dual'
    n_max: int = 8
    q_max: int = 3
    cosimplicial_q_max: int = 5
    j_max: int = 6
    k_max: int = 6
    g_max: int = 4
    seed: int = 0
    coefficients: str = 'Z'
    output_format: str = 'text'
    options: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: argparse.Namespace, env: Optional[BoundsConfig] = None) -> 'RunConfig':
        """Merge parsed flags over environment defaults.

        Raises:
            ValueError: If a value is out of range
        """
        env = env or BoundsConfig()
        cosimplicial_default = env.cosimplicial_q_max
        if args.command == 'cosimplicial' and getattr(args, 'qmax', None) is not None:
            cosimplicial_default = args.qmax

        def pick(name: str, default):
            value = getattr(args, name, None)
            return default if value is None else value

        config = cls(
            command=args.command,
            algebra=pick('algebra', 'dual'),
            n_max=pick('nmax', env.n_max),
            q_max=pick('qmax', env.q_max),
            cosimplicial_q_max=pick('cosimplicial_qmax', cosimplicial_default),
            j_max=pick('J', env.j_max),
            k_max=pick('K', env.k_max),
            g_max=pick('gmax', env.g_max),
            seed=pick('seed', env.seed),
            coefficients=pick('coefficients', env.coefficients),
            output_format=pick('format', env.output_format),
        )
        skip = {'command', 'algebra', 'nmax', 'qmax', 'cosimplicial_qmax', 'J', 'K', 'gmax', 'seed', 'coefficients',
                'format', 'log_json', 'log_level', 'log_file'}
        config.options = {key: value for key, value in vars(args).items() if key not in skip}
        config.validate()
        return config

    def validate(self) -> None:
        """Check every bound.

        Raises:
            ValueError: If any value is out of range
        """
        ValidatedConfig._validate_range(self.n_max, 1, 16, 'n_max')
        ValidatedConfig._validate_range(self.q_max, 0, 8, 'q_max')
        ValidatedConfig._validate_range(self.cosimplicial_q_max, 1, 6, 'cosimplicial_q_max')
        ValidatedConfig._validate_range(self.j_max, 1, 10, 'J')
        ValidatedConfig._validate_range(self.k_max, 1, 10, 'K')
        ValidatedConfig._validate_range(self.g_max, 1, 8, 'g_max')
        ValidatedConfig._validate_choice(self.coefficients, ['Z', 'Q'], 'coefficients')
        ValidatedConfig._validate_choice(self.output_format, ['text', 'json'], 'format')

    def bounds(self) -> Dict[str, int]:
        """The numeric bounds, for reports."""
        return {'n_max': self.n_max, 'q_max': self.q_max, 'cosimplicial_q_max': self.cosimplicial_q_max,
                'J': self.j_max, 'K': self.k_max, 'g_max': self.g_max}


def load_algebra(source: str) -> FrobeniusAlgebraSpec:
    """Built-in name or JSON file, validated.

    Raises:
        UsageError: If the name is unknown or the file fails validation
    """
    path = Path(source)
    if path.suffix == '.json' or path.is_file():
        if not path.is_file():
            raise UsageError(f"algebra file {source!r} does not exist")
    try:
        spec = algebra_module.from_json(path.read_text(encoding='utf-8')) if path.is_file() else builtin(source)
        validate(spec)
    except ValueError as exc:
        raise UsageError(f"cannot use algebra {source!r}: {exc}") from exc
    return spec


def error_report(name: str, exc: ValueError) -> VerificationReport:
    """Failing report for a library error raised in the middle of a run."""
    return VerificationReport(name, False, 0, getattr(exc, 'witness', None),
                              {'error': type(exc).__name__, 'message': str(exc)})


# ----------------------------------------------------------------------------
# Suites
# ----------------------------------------------------------------------------

def _random_relabel(og: graph_core.OrientedBWGraph, rng: random.Random) -> graph_core.OrientedBWGraph:
    vertices = og.graph.vertices
    halves = og.graph.half_edges
    shuffled_v, shuffled_h = vertices[:], halves[:]
    rng.shuffle(shuffled_v)
    rng.shuffle(shuffled_h)
    return graph_core.relabel(og, dict(zip(vertices, shuffled_v)), dict(zip(halves, shuffled_h)))


def graph_suite(config: RunConfig, samples: int = 50) -> List[VerificationReport]:
    """d^2 = 0 and relabelling invariance of canonical forms on random BW graphs."""
    rng = random.Random(config.seed)
    square_witness = None
    canonical_witness = None
    for i in range(samples):
        og = graph_core.random_bw_graph(rng, max_degree=4)
        code, sign = graph_core.canonical_form(og)
        if sign and square_witness is None:
            if graph_core.differential(graph_core.differential({code: sign})):
                square_witness = i
        if graph_core.canonical_form(_random_relabel(og, rng)) != (code, sign) and canonical_witness is None:
            canonical_witness = i
    return [
        VerificationReport('graph_square', square_witness is None, samples, square_witness),
        VerificationReport('graph_canonical', canonical_witness is None, samples, canonical_witness),
    ]


def ainfty_suite(config: RunConfig) -> List[VerificationReport]:  # pylint: disable=unused-argument
    """m_3 identity, d^2 = 0 on planar forests n -> m and the l-squared relation."""
    witness = None
    checked = 0
    for n in range(2, 7):
        for m in (1, 2):
            for forest in planar_forests(n, m):
                checked += 1
                if not forest_differential(forest_differential(forest)).is_zero() and witness is None:
                    witness = (n, m)
    return [
        verify_m3_identity(),
        VerificationReport('ainfty_square', witness is None, checked, witness),
        verify_l_squared(6),
    ]


def algebra_suite(config: RunConfig) -> List[VerificationReport]:  # pylint: disable=unused-argument
    """Frobenius axioms of the built-ins."""
    return [verify_frobenius(builtin(name)) for name in ALGEBRA_SUITE]


def _dual_reduced_homology(n_max: int) -> Dict[int, Any]:
    c = build_hochschild(HochschildComplexSpec(builtin('dual'), n_max=n_max, reduced=True))
    return {degree: homology(c, degree) for degree in range(0, max(n_max - 2, 1))}


def dual_table_report(n_max: int) -> VerificationReport:
    """Reduced homology of the dual numbers: Z^2, then Z + Z/2 and Z alternating.

    The table is recomputed at n_max + 1 and must not move.
    """
    table = _dual_reduced_homology(n_max)
    extended = _dual_reduced_homology(n_max + 1)
    witness = None
    for degree, group in table.items():
        if degree == 0:
            expected: Tuple[int, Tuple[int, ...]] = (2, ())
        elif degree % 2:
            expected = (1, (2,))
        else:
            expected = (1, ())
        if (group.betti, group.torsion) != expected and witness is None:
            witness = degree
    moved = [degree for degree, group in table.items() if extended[degree] != group]
    if moved and witness is None:
        witness = moved[0]
    return VerificationReport('hochschild_dual_reduced', witness is None, len(table), witness,
                              {'homology': {d: str(g) for d, g in table.items()}, 'stable': not moved})


def hochschild_square_report(name: str, n_max: int) -> VerificationReport:
    """d^2 = 0 on the unreduced complex of a built-in, checked while assembling."""
    report_name = f'hochschild_square:{name}'
    try:
        c = build_hochschild(HochschildComplexSpec(builtin(name), n_max=n_max))
    except AssemblyError as exc:
        return error_report(report_name, exc)
    ranks = {degree: c.dimension(degree) for degree in c.degrees()}
    return VerificationReport(report_name, True, sum(ranks.values()), None, {'n_max': n_max, 'ranks': ranks})


def hochschild_suite(config: RunConfig) -> List[VerificationReport]:
    """Reduced homology of the dual numbers, d^2 = 0, cap identity and unit homotopies."""
    reports = [dual_table_report(config.n_max)]
    for name in ('dual', 'sphere3'):
        reports.append(hochschild_square_report(name, config.n_max))
        reports.append(verify_cap_identity(builtin(name), p_max=4, q_max=config.q_max))
    dual = builtin('dual')
    for r in range(2, 5):
        reports.append(verify_unit_homotopies(dual, r, min(config.n_max, 6)))
    reports.append(quotient_is_chain_map(dual, min(config.n_max, 5)))
    return reports


def cosimplicial_suite(config: RunConfig) -> List[VerificationReport]:
    """Inj(r) contraction, concentration, identities, splitting and classification of K(.+1, X)."""
    reports = [verify_inj_contraction(r, 6) for r in range(0, 3)]
    bound = config.cosimplicial_q_max
    for circles in range(0, 4):
        for intervals in range(0, 4 - circles):
            if circles + intervals == 0:
                continue
            x = OneManifold(circles, intervals)
            reports.append(verify_concentration(x, bound, coefficients=config.coefficients))
            if circles:
                reports.append(verify_concentration(x, bound, complete=True, coefficients=config.coefficients))
            t = configuration_cosimplicial_set(x, bound)
            failures = list(identity_failures(t))
            reports.append(VerificationReport(f'identities:{t.name}', not failures, len(t.levels),
                                              failures[0] if failures else None))
            reports.append(simplex_splitting(t))
            reports.append(verify_classification(t, q_limit=4))
            reports.append(verify_complete_split(x, bound))
    return reports


def sullivan_suite(config: RunConfig, samples: int = 20) -> List[VerificationReport]:
    """mu_g and t_g are cycles of degree 2g+1; d^2 = 0 on random diagrams."""
    reports = []
    for label, build in (('mu', mu_graph), ('t', t_graph)):
        details = {}
        witness = None
        for g in range(1, config.g_max + 1):
            combo = from_bw(build(g))
            (diagram, _), = combo.items()
            faces = differential_faces(diagram)
            record = {'degree': diagram.degree, 'faces': len(faces), 'cycle': is_cycle(combo)}
            details[f'{label}_{g}'] = record
            ok = record['degree'] == 2 * g + 1 and record['cycle'] and len(faces) % 2 == 0
            if not ok and witness is None:
                witness = (label, g)
        reports.append(VerificationReport(f'sullivan_{label}_cycles', witness is None, config.g_max, witness,
                                          details))
    rng = random.Random(config.seed)
    witness = None
    for i in range(samples):
        combo = from_bw(random_sullivan_graph(rng))
        if sd_differential(sd_differential(combo)) and witness is None:
            witness = i
    reports.append(VerificationReport('sullivan_square', witness is None, samples, witness))
    return reports


def action_suite(config: RunConfig) -> List[VerificationReport]:
    """t_g and mu_g evaluations give nonzero classes."""
    reports = [homology_action_report(builtin('dual'), config.g_max)]
    for name in ('sphere2', 'sphere3'):
        reports.append(homology_action_report(builtin(name), min(config.g_max, 3)))
    reports.append(mu_action_report(builtin('dual'), min(config.g_max, 3)))
    return reports


def formal_suite(config: RunConfig) -> List[VerificationReport]:
    """Cap embedding is a chain map; d^2 = 0 on the truncation."""
    reports = []
    for name in ('dual', 'sphere3'):
        reports.append(verify_capprop(builtin(name), config.q_max, config.j_max, config.k_max))
    rng = random.Random(config.seed)
    reports.append(verify_nat_square(NatTruncation(builtin('dual'), 4, 4), rng))
    return reports


SUITES: Tuple[Tuple[str, Callable[[RunConfig], List[VerificationReport]]], ...] = (
    ('graph_core', graph_suite),
    ('ainfty', ainfty_suite),
    ('algebra', algebra_suite),
    ('hochschild', hochschild_suite),
    ('cosimplicial', cosimplicial_suite),
    ('sullivan', sullivan_suite),
    ('tqft_action', action_suite),
    ('formal_ops', formal_suite),
)


# ----------------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------------

def _envelope(config: RunConfig, reports: Sequence[VerificationReport], **extra) -> Dict[str, Any]:
    data = {
        'command': config.command,
        'seed': config.seed,
        'bounds': config.bounds(),
        'coefficients': config.coefficients,
        'conventions': CONVENTIONS,
        'passed': all(r.passed for r in reports),
        'reports': [r.to_dict() for r in reports],
    }
    data.update(extra)
    return data


def verify_all(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    """Run every suite in order; informational reports do not affect the status."""
    reports: List[VerificationReport] = []
    for name, suite in SUITES:
        with log_context(logger, suite=name, seed=config.seed) as log:
            try:
                results = suite(config)
            except ValueError as exc:
                log.error("Suite aborted: %s", exc)
                results = [error_report(f'{name}:aborted', exc)]
            log.info("Suite finished", extra={'passed': all(r.passed for r in results)})
        reports.extend(results)
    informational = [chain_map_report(builtin('dual'), g_max=1).to_dict()]
    data = _envelope(config, reports, informational=informational)
    return (EXIT_OK if data['passed'] else EXIT_FAILED), data


def run_hochschild(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    """Homology table of one algebra."""
    spec = load_algebra(config.algebra)
    reduced = bool(config.options.get('reduced'))
    c = build_hochschild(HochschildComplexSpec(spec, n_max=config.n_max, reduced=reduced))
    stable = [d for d in c.degrees() if d <= config.n_max - 2]
    table = homology_table(c, stable, config.coefficients)
    return EXIT_OK, _envelope(config, [], algebra=spec.name, reduced=reduced,
                              homology={str(d): group for d, group in table.items()})


def run_cosimplicial(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    """Concentration report for one 1-manifold, or the Inj(r) contraction."""
    q_max = config.cosimplicial_q_max
    inj = config.options.get('inj')
    if inj is not None:
        if not 0 <= inj <= q_max:
            raise UsageError(f"--inj must lie between 0 and {q_max}, got {inj}")
        reports = [verify_inj_contraction(inj, q_max)]
    else:
        try:
            x = OneManifold.parse(config.options.get('manifold') or 'c=1,i=0')
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        reports = [verify_concentration(x, q_max, complete=bool(config.options.get('complete')),
                                        coefficients=config.coefficients)]
    data = _envelope(config, reports)
    return (EXIT_OK if data['passed'] else EXIT_FAILED), data


def parse_diagram(text: str) -> graph_core.OrientedBWGraph:
    """``mu:g``, ``tg:g`` or ``l:n`` (also ``l_n``, ``m_k``).

    Raises:
        UsageError: For an unknown identifier
    """
    kind, _, number = text.replace('_', ':').partition(':')
    if not number.isdigit():
        raise UsageError(f"unknown object {text!r}")
    value = int(number)
    builders = {'mu': mu_graph, 'tg': t_graph, 't': t_graph, 'l': graph_core.l_graph,
                'm': graph_core.corolla_graph}
    if kind not in builders:
        raise UsageError(f"unknown object {text!r}")
    try:
        return builders[kind](value)
    except ValueError as exc:
        raise UsageError(f"cannot build {text!r}: {exc}") from exc


def _inputs(spec: FrobeniusAlgebraSpec, og: graph_core.OrientedBWGraph, names: str) -> Dict[int, Dict[int, int]]:
    labels = sorted(lab for lab in og.graph.leaf_labels.values() if lab)
    given = [name.strip() for name in names.split(',') if name.strip()]
    if len(given) == 1:
        given = given * len(labels)
    if len(given) != len(labels):
        raise UsageError(f"diagram has {len(labels)} leaves, got {len(given)} inputs")
    unknown = [name for name in given if name not in spec.basis]
    if unknown:
        raise UsageError(f"unknown basis elements {unknown} for algebra {spec.name!r}")
    return {lab: {spec.basis.index(name): 1} for lab, name in zip(labels, given)}


def run_act(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    """Evaluate a diagram on basis inputs and report the homology class."""
    spec = load_algebra(config.algebra)
    og = parse_diagram(config.options.get('diagram') or 'tg:1')
    inputs = _inputs(spec, og, config.options.get('input') or 'x')
    reduced = not config.options.get('unreduced')
    chain = evaluate(LabeledDiagram(og, inputs), spec, reduced=reduced)
    record = class_record(spec, chain) if reduced else {}
    return EXIT_OK, _envelope(config, [], algebra=spec.name, diagram=config.options.get('diagram'),
                              chain=spec.format_combination(chain), homology_class=record)


def run_natcheck(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    """Cap embedding check and d^2 = 0 on random elements."""
    spec = load_algebra(config.algebra)
    reports = [verify_capprop(spec, config.q_max, config.j_max, config.k_max),
               verify_nat_square(NatTruncation(spec, min(config.j_max, 4), min(config.k_max, 4)),
                                 random.Random(config.seed))]
    data = _envelope(config, reports, algebra=spec.name)
    return (EXIT_OK if data['passed'] else EXIT_FAILED), data


def export_text(object_id: str, target: str) -> str:
    """JSON, DOT or classical JSON for a named object.

    Raises:
        UsageError: For an unknown identifier or target
    """
    if object_id.startswith('algebra:'):
        return algebra_module.to_json(load_algebra(object_id.split(':', 1)[1]))
    og = parse_diagram(object_id)
    if target == 'json':
        return graph_core.to_json(og)
    if target == 'dot':
        return graph_core.to_dot(og, object_id.replace(':', '_'))
    if target == 'classical':
        try:
            (diagram, _), = from_bw(og).items()
        except ValueError as exc:
            raise UsageError(f"{object_id!r} is not a single Sullivan diagram: {exc}") from exc
        return diagram_to_json(diagram)
    raise UsageError(f"unknown export target {target!r}")


def run_export(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    """Write or print an export."""
    text = export_text(config.options['object'], config.options.get('to') or 'json')
    output = config.options.get('output')
    if output:
        Path(output).write_text(text + '\n', encoding='utf-8')
    return EXIT_OK, _envelope(config, [], object=config.options['object'], output=output,
                              content=None if output else text)


COMMANDS = {
    'verify-all': verify_all,
    'hochschild': run_hochschild,
    'cosimplicial': run_cosimplicial,
    'act': run_act,
    'natcheck': run_natcheck,
    'export': run_export,
}


# ----------------------------------------------------------------------------
# Rendering and entry point
# ----------------------------------------------------------------------------

def render(data: Dict[str, Any], output_format: str) -> str:
    """Serialize a run result; JSON output is byte-stable."""
    if output_format == 'json':
        return json.dumps(data, sort_keys=True, indent=2)
    if data['command'] == 'export' and data.get('content') is not None:
        return data['content']
    lines = [f"{data['command']} (seed={data['seed']}, bounds={data['bounds']})"]
    for report in data['reports']:
        status = 'PASS' if report['passed'] else 'FAIL'
        suffix = f" witness={report['witness']}" if report['witness'] is not None else ''
        lines.append(f"  {status} {report['name']} (checked {report['checked']}){suffix}")
    for key in ('homology', 'chain', 'homology_class', 'output'):
        if key in data and data[key] is not None:
            value = data[key]
            if isinstance(value, dict):
                lines.append(f'  {key}:')
                lines.extend(f'    {k}: {v}' for k, v in sorted(value.items()))
            else:
                lines.append(f'  {key}: {value}')
    for report in data.get('informational', []):
        lines.append(f"  INFO {report['name']}: {'matched' if report['passed'] else 'unmatched'}")
    return '\n'.join(lines)


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per command."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--algebra', help="built-in name (dual, sphereN) or JSON file")
    common.add_argument('--nmax', type=int)
    common.add_argument('--qmax', type=int)
    common.add_argument('--cosimplicial-qmax', type=int, dest='cosimplicial_qmax',
                        help="top level of the configuration cosimplicial sets")
    common.add_argument('--J', type=int)
    common.add_argument('--K', type=int)
    common.add_argument('--gmax', type=int)
    common.add_argument('--seed', type=int)
    common.add_argument('--coefficients', choices=['Z', 'Q'])
    common.add_argument('--format', choices=['text', 'json'])
    common.add_argument('--log-json', action='store_true', help="structured JSON log records")
    common.add_argument('--log-level')
    common.add_argument('--log-file')

    parser = argparse.ArgumentParser(prog='homalg', description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest='command', required=True)
    sub.add_parser('verify-all', parents=[common], help="run every verification suite")
    hoch = sub.add_parser('hochschild', parents=[common], help="Hochschild homology table")
    hoch.add_argument('--reduced', action='store_true')
    cos = sub.add_parser('cosimplicial', parents=[common], help="cosimplicial concentration")
    cos.add_argument('--manifold', help="e.g. c=1,i=2")
    cos.add_argument('--complete', action='store_true')
    cos.add_argument('--inj', type=int, help="check Inj(r) instead")
    act = sub.add_parser('act', parents=[common], help="evaluate a Sullivan diagram")
    act.add_argument('--diagram', default='tg:1', help="tg:g, mu:g or l:n")
    act.add_argument('--input', default='x', help="basis names for the leaves, comma separated")
    act.add_argument('--unreduced', action='store_true')
    sub.add_parser('natcheck', parents=[common], help="cap embedding chain-map check")
    exp = sub.add_parser('export', parents=[common], help="export a built-in object")
    exp.add_argument('object', help="m_k, l_n, mu:g, tg:g or algebra:NAME")
    exp.add_argument('--to', choices=['json', 'dot', 'classical'], default='json')
    exp.add_argument('--output')
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run the command and print its report.

    Returns:
        Exit status 0, 1 or 2
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    env = BoundsConfig()
    try:
        env.validate()
        config = RunConfig.from_args(args, env)
        setup_logging(level=(args.log_level or env.log_level).upper(),
                      log_file=args.log_file or env.log_file or None, json_format=args.log_json)
    except ValueError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logger.info("Run started", extra={'command': config.command, 'seed': config.seed, **config.bounds()})
    try:
        status, data = COMMANDS[config.command](config)
    except UsageError as exc:
        logger.error("Run aborted: %s", exc, extra={'command': config.command})
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        logger.error("Run failed: %s", exc, extra={'command': config.command, 'error': type(exc).__name__})
        status, data = EXIT_FAILED, _envelope(config, [error_report(f'{config.command}:aborted', exc)])
    print(render(data, config.output_format))
    logger.info("Run finished", extra={'command': config.command, 'status': status})
    return status


if __name__ == '__main__':  # pragma: no cover
    sys.exit(main())

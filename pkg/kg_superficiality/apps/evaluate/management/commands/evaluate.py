"""
Management command comparing real, generated and theoretical distributions.
"""
import logging
import os

from celery import group

from kg_superficiality.apps.core.constants import (
    EVALUATE,
    LONGITUDINAL_FILE,
    PROFILES_FILE,
    REFIT_GRID_FILE,
    ROLE_OUT,
    ROLES,
    SUMMARY_FILE,
    TASK_TIMEOUT,
    TELEMETRY_FILE,
)
from kg_superficiality.apps.core.management.base import KgSimCommand, parse_seed
from kg_superficiality.apps.core.utils import write_csv, write_json
from kg_superficiality.apps.evaluate.divergence import (
    Divergence,
    DivergenceReport,
    head_table,
)
from kg_superficiality.apps.evaluate.experiments import (
    MULTIPLEXING_SIGMAS,
    MULTIPLEXING_STEPS,
    LONGITUDINAL_HEADER,
    REFIT_GRID,
    REFIT_HEADER,
    REFIT_STEPS,
    ablation_steps,
    multiplexing_file_name,
    longitudinal_report,
    parse_labelled_path,
    refit_grid_experiment,
    refit_rows,
)
from kg_superficiality.apps.evaluate.laws import load_runs, telemetry_checks
from kg_superficiality.apps.evaluate.tasks import (
    compare_variant_task,
    multiplexing_task,
    refit_cell_task,
    telemetry_run_task,
)
from kg_superficiality.apps.generator.config import VARIANTS, GenerationConfig
from kg_superficiality.apps.stats.histograms import DegreeHistogram
from kg_superficiality.apps.stats.reports import load_histogram, load_summary
from kg_superficiality.apps.theory.distributions import parse_range


logger = logging.getLogger(__name__)

ABLATE = 'ablate'
FIG3A = 'fig3a'
# Alias of fig3a
MULTIPLEXING = 'multiplexing'
TELEMETRY = 'telemetry'
LONGITUDINAL = 'longitudinal'
REFIT = 'refit'
ACTIONS = (ABLATE, FIG3A, MULTIPLEXING, TELEMETRY, LONGITUDINAL, REFIT)

TELEMETRY_RUNS = 30
RUNS_DIR = 'runs'
REFIT_SUMMARY_FILE = 'refit_summary.json'


def head_file_name(role):
    return f'head_{role}.csv'


class Command(KgSimCommand):
    help = (
        'Evaluates generations: ablate (KL of the four ablation variants against a fitted graph), '
        'fig3a, alias multiplexing (25 identical relationships at two superficialities), telemetry '
        '(asymptotic laws over independent runs), longitudinal (table of fitted snapshots) and refit '
        '(parameter recovery over an alpha x beta grid). Outputs go to --out.'
    )
    subcommand = EVALUATE
    defaults = {'role': ROLE_OUT, 'scale': 1.0}

    def add_command_arguments(self, parser):
        parser.add_argument(
            'action',
            choices=ACTIONS,
            help='Experiment to run.',
        )
        parser.add_argument(
            '--stats',
            help='Output directory of fit for the reference graph (ablate).',
        )
        parser.add_argument(
            '--role',
            choices=ROLES,
            help='Role compared (ablate, default out).',
        )
        parser.add_argument(
            '--scale',
            type=float,
            help='Steps as a fraction of the reference facts, T = round(scale * |F|) (ablate, default 1).',
        )
        parser.add_argument(
            '--seeds',
            type=int,
            help='Seeds per variant (ablate, default 1) or runs to generate (telemetry, default 30).',
        )
        parser.add_argument(
            '--variant',
            action='append',
            choices=VARIANTS,
            help='Ablation variant to run; may be repeated (ablate, default all four).',
        )
        parser.add_argument(
            '--sigma',
            dest='sigmas',
            action='append',
            type=float,
            help='Superficiality of a multiplexing run; may be repeated (multiplexing, default 0.05 and 0.95).',
        )
        parser.add_argument(
            '--steps',
            type=int,
            help='Steps per generation (multiplexing default 2000000, refit default 100000, telemetry overrides the config).',
        )
        parser.add_argument(
            '--runs',
            help='Directory of run directories holding telemetry.csv (telemetry).',
        )
        parser.add_argument(
            '--summary',
            action='append',
            help='Fitted summary as LABEL=PATH, PATH a summary.json or fit output directory; '
                 'may be repeated (longitudinal).',
        )
        parser.add_argument(
            '--alphas',
            help='Ground-truth alphas START:STOP:STEP or a comma-separated list (refit).',
        )
        parser.add_argument(
            '--betas',
            help='Ground-truth betas START:STOP:STEP or a comma-separated list (refit).',
        )

    def _positive(self, config, name, default):
        value = config.get(name)
        value = default if value is None else int(value)
        if value < 1:
            self.usage_error(f'--{name} must be at least 1')
        return value

    def _ablate(self, config, seed):
        if not config.get('stats'):
            self.usage_error('evaluate ablate requires --stats')
        stats_dir = config['stats']
        role = config['role']
        scale = float(config['scale'])
        variants = config.get('variant') or list(VARIANTS)
        seeds = [seed + offset for offset in range(self._positive(config, 'seeds', 1))]
        reference = load_histogram(stats_dir, role)
        ablation_steps(load_summary(stats_dir), role, scale)
        tasks = []
        for variant in variants:
            for run_seed in seeds:
                logger.info('Spinning off compare_variant_task for %s with seed %d', variant, run_seed)
                tasks.append(compare_variant_task.s(stats_dir, variant, run_seed, role, scale))
        results = group(tasks).apply_async().get(timeout=TASK_TIMEOUT)
        report = DivergenceReport()
        heads = {}
        for result in results:
            report.add(result['variant'], result['role'], result['seed'], Divergence(
                kl=result['kl'],
                epsilon=result['epsilon'],
                floored=result['floored'],
                support_reference=result['support_reference'],
                support_generated=result['support_generated'],
            ))
            if result['variant'] not in heads:
                heads[result['variant']] = DegreeHistogram.from_mapping(result['histogram'])
        out_dir = config['out']
        report.write(out_dir)
        header, rows = head_table(reference, heads)
        write_csv(os.path.join(out_dir, head_file_name(role)), header, rows)
        summary = report.summary()
        logger.info('Ablation on %s: best variant %s', role, summary['roles'][role]['best_variant'])
        return {
            'seed': seed,
            'inputs': [
                os.path.join(stats_dir, name) for name in (PROFILES_FILE, SUMMARY_FILE)
            ],
            'report': summary,
        }

    def _multiplexing(self, config, seed):
        sigmas = config.get('sigmas') or list(MULTIPLEXING_SIGMAS)
        steps = self._positive(config, 'steps', MULTIPLEXING_STEPS)
        out_dir = config['out']
        tasks = [
            multiplexing_task.s(sigma, steps, seed, os.path.join(out_dir, multiplexing_file_name(sigma)))
            for sigma in sigmas
        ]
        summaries = group(tasks).apply_async().get(timeout=TASK_TIMEOUT)
        for summary in summaries:
            logger.info(
                'sigma=%s: empirical mode of P(r) at %d (theory %d), total variation %.4f',
                summary['sigma'], summary['empirical_mode'], summary['theory_mode'], summary['total_variation'],
            )
        return {'seed': seed, 'report': {'runs': summaries}}

    def _telemetry(self, config, seed):
        out_dir = config['out']
        inputs = []
        if config.get('runs'):
            telemetries, generation = load_runs(config['runs'])
            inputs = [
                os.path.join(config['runs'], name, TELEMETRY_FILE) for name in sorted(os.listdir(config['runs']))
                if os.path.isfile(os.path.join(config['runs'], name, TELEMETRY_FILE))
            ]
        else:
            if config.get('sigma') is None or config.get('steps') is None:
                self.usage_error('evaluate telemetry requires --runs, or a --config generation file with sigma and steps')
            generation = GenerationConfig.from_dict(config).validate()
            payload = generation.to_dict()
            runs_dir = os.path.join(out_dir, RUNS_DIR)
            seeds = [seed + offset for offset in range(self._positive(config, 'seeds', TELEMETRY_RUNS))]
            tasks = [
                telemetry_run_task.s(payload, run_seed, os.path.join(runs_dir, f'seed-{run_seed}'))
                for run_seed in seeds
            ]
            group(tasks).apply_async().get(timeout=TASK_TIMEOUT)
            telemetries, _ = load_runs(runs_dir)
        report = telemetry_checks(telemetries, generation)
        report.write(out_dir)
        logger.info(
            'Telemetry laws over %d runs: %d checks, %d failed',
            report.runs, len(report.checks), len(report.failures()),
        )
        return {
            'seed': None if config.get('runs') else seed,
            'inputs': inputs,
            'report': {'passed': report.passed, 'failed': [check.law for check in report.failures()]},
        }

    def _longitudinal(self, config):
        if not config.get('summary'):
            self.usage_error('evaluate longitudinal requires at least one --summary LABEL=PATH')
        try:
            labelled = [parse_labelled_path(text) for text in config['summary']]
        except ValueError as exc:
            self.usage_error(str(exc))
        rows = longitudinal_report((label, load_summary(path)) for label, path in labelled)
        write_csv(os.path.join(config['out'], LONGITUDINAL_FILE), LONGITUDINAL_HEADER, rows)
        return {'inputs': [path for _, path in labelled if os.path.isfile(path)]}

    def _refit(self, config, seed):
        try:
            alphas = parse_range(config.get('alphas') or REFIT_GRID)
            betas = parse_range(config.get('betas') or REFIT_GRID)
        except ValueError as exc:
            self.usage_error(str(exc))
        steps = self._positive(config, 'steps', REFIT_STEPS)

        def run_cells(arguments):
            tasks = [refit_cell_task.s(*item) for item in arguments]
            return group(tasks).apply_async().get(timeout=TASK_TIMEOUT)

        cells, summary = refit_grid_experiment(alphas, betas, steps=steps, seed=seed, run_cell=run_cells)
        out_dir = config['out']
        write_csv(os.path.join(out_dir, REFIT_GRID_FILE), REFIT_HEADER, refit_rows(cells))
        write_json(os.path.join(out_dir, REFIT_SUMMARY_FILE), summary)
        logger.info('Refit grid of %d cells: mean KL %.6g, max KL %.6g', summary['cells'], summary['mean_kl'],
                    summary['max_kl'])
        return {'seed': seed, 'report': summary}

    def run(self, config):
        if not config.get('out'):
            self.usage_error('evaluate requires --out')
        action = config['action']
        if action == LONGITUDINAL:
            return self._longitudinal(config)
        seed = parse_seed(config.get('seed'))
        config['seed'] = seed
        if action == ABLATE:
            return self._ablate(config, seed)
        if action in (FIG3A, MULTIPLEXING):
            return self._multiplexing(config, seed)
        if action == TELEMETRY:
            return self._telemetry(config, seed)
        return self._refit(config, seed)

"""
Celery tasks of the evaluate app. Each runs one independent generation.
"""
import logging
import os

from celery import shared_task
from celery_utils.logged_task import LoggedTask

from kg_superficiality.apps.core.constants import TELEMETRY_FILE
from kg_superficiality.apps.core.utils import ensure_dir, write_csv, write_json
from kg_superficiality.apps.evaluate.experiments import (
    MULTIPLEXING_HEADER,
    compare_to_real,
    multiplexing_experiment,
    refit_cell,
)
from kg_superficiality.apps.evaluate.laws import GENERATION_FILE
from kg_superficiality.apps.generator.config import GenerationConfig
from kg_superficiality.apps.generator.engine import generate


logger = logging.getLogger(__name__)


@shared_task(base=LoggedTask, bind=True)
def compare_variant_task(self, stats_dir, variant, seed, role, scale):  # pylint: disable=unused-argument
    """
    Runs one ablation variant against the fitted graph in ``stats_dir``.

    Returns:
        dict: the divergence and the generated histogram (degree -> count, string keys).
    """
    comparison = compare_to_real(stats_dir, variant, seed, role=role, scale=scale)
    divergence = comparison.divergence
    return {
        'variant': variant,
        'role': role,
        'seed': seed,
        'steps': comparison.steps,
        'kl': divergence.kl,
        'epsilon': divergence.epsilon,
        'floored': divergence.floored,
        'support_reference': divergence.support_reference,
        'support_generated': divergence.support_generated,
        'histogram': {str(degree): count for degree, count in comparison.histogram.as_dict().items()},
    }


@shared_task(base=LoggedTask, bind=True)
def multiplexing_task(self, sigma, steps, seed, path):  # pylint: disable=unused-argument
    """
    Runs the multiplexing experiment at ``sigma`` and writes its CSV to ``path``.
    """
    run = multiplexing_experiment(sigma, steps=steps, seed=seed)
    write_csv(path, MULTIPLEXING_HEADER, run.rows())
    return run.summary()


@shared_task(base=LoggedTask, bind=True)
def refit_cell_task(self, alpha, beta, steps, seed):  # pylint: disable=unused-argument
    return refit_cell(alpha, beta, steps, seed)


@shared_task(base=LoggedTask, bind=True)
def telemetry_run_task(self, config_payload, seed, run_dir):  # pylint: disable=unused-argument
    """
    Generates one run of a telemetry study and keeps only its telemetry and config.
    """
    config = GenerationConfig.from_dict(config_payload)
    result = generate(config, seed)
    ensure_dir(run_dir)
    result.telemetry.write(os.path.join(run_dir, TELEMETRY_FILE))
    payload = config.to_dict()
    payload['seed'] = seed
    write_json(os.path.join(run_dir, GENERATION_FILE), payload)
    return run_dir

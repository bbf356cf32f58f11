"""
Helpers building small fitted graphs for the evaluate tests.
"""
import os

from django.core.management import call_command

from kg_superficiality.apps.core.constants import ROLE_OUT
from kg_superficiality.apps.generator.config import (
    GenerationConfig,
    RelationshipParameters,
    RoleParameters,
)
from kg_superficiality.apps.generator.engine import generate
from kg_superficiality.apps.generator.outputs import write_generation


GROUND_TRUTH = ((0.3, 0.8, 0.9), (0.25, 0.6, 0.4), (0.2, 0.5, 1.0), (0.15, 0.3, 0.1), (0.1, 0.7, 0.6))


def ground_truth_config(steps, parameters=GROUND_TRUTH, sigma=0.7, role=ROLE_OUT):
    """
    A heterogeneous single-role config from (rho, beta, alpha) triples.
    """
    return GenerationConfig(
        relationships=[
            RelationshipParameters(rho=rho, roles={role: RoleParameters(beta=beta, alpha=alpha)})
            for rho, beta, alpha in parameters
        ],
        sigma={role: sigma},
        steps=steps,
        role=role,
    )


def fitted_ground_truth(root, steps=3000, seed=99, **kwargs):
    """
    Generates a ground-truth graph under ``root/graph`` and fits it into ``root/stats``.

    Returns:
        str: the stats directory.
    """
    graph_dir = os.path.join(root, 'graph')
    stats_dir = os.path.join(root, 'stats')
    os.makedirs(graph_dir, exist_ok=True)
    write_generation(graph_dir, generate(ground_truth_config(steps, **kwargs), seed))
    call_command('fit', '--edges', graph_dir, '--out', stats_dir, '--role', ROLE_OUT)
    return stats_dir

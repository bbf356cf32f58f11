""" Constants shared by the kg_superficiality apps. """
import numpy as np


# Roles of an entity in a fact
ROLE_OUT = 'out'
ROLE_IN = 'in'
ROLES = (ROLE_OUT, ROLE_IN)

# Edge stream column holding the entity for each role
ROLE_COLUMNS = {
    ROLE_OUT: 0,
    ROLE_IN: 2,
}

# Edge streams are fixed-width little-endian (subject, relationship, object) triples
EDGE_DTYPE = np.dtype('<u4')
EDGE_WIDTH = 3

# Endpoint written for the role a single-role generation does not produce
NULL_ENTITY = np.iinfo(EDGE_DTYPE).max

# File names inside an output directory
EDGES_FILE = 'edges.bin'
ENTITIES_FILE = 'entities.txt'
RELATIONSHIPS_FILE = 'relationships.txt'
INGEST_SUMMARY_FILE = 'ingest_summary.json'
MANIFEST_FILE = 'manifest.json'
PROFILES_FILE = 'profiles.json'
SUMMARY_FILE = 'summary.json'
CHARACTERISTICS_FILE = 'characteristics.csv'
TELEMETRY_FILE = 'telemetry.csv'
REGISTRY_FILE = 'registry.npz'
DIVERGENCE_FILE = 'divergence.csv'
TELEMETRY_REPORT_FILE = 'telemetry_report.json'
LONGITUDINAL_FILE = 'longitudinal.csv'
REFIT_GRID_FILE = 'refit_grid.csv'

# Subcommands exposed by the kgsim entry point
INGEST = 'ingest'
FIT = 'fit'
GENERATE = 'generate'
EVALUATE = 'evaluate'
THEORY = 'theory'
PIPELINE = 'pipeline'
SUBCOMMANDS = (INGEST, FIT, GENERATE, EVALUATE, THEORY, PIPELINE)
SUBCOMMAND_CHOICES = [(name, name) for name in SUBCOMMANDS]

# Async task constants
TASK_TIMEOUT = 24 * 60 * 60  # A full-dump generation may take most of a day

# Full double precision in every CSV
FLOAT_FORMAT = '%.17g'

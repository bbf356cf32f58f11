import factory

import kg_superficiality
from kg_superficiality.apps.core.constants import SUBCOMMANDS
from kg_superficiality.apps.core.models import RunManifest


class RunManifestFactory(factory.django.DjangoModelFactory):
    """
    Test factory for the `RunManifest` model
    """
    class Meta:
        model = RunManifest

    subcommand = factory.Iterator(SUBCOMMANDS)
    output_dir = factory.Sequence(lambda n: f'runs/run_{n}')
    seed = factory.Faker('pyint', min_value=0, max_value=2 ** 32 - 1)
    tool_version = kg_superficiality.__version__
    config = factory.Dict({'threads': 1, 'out': factory.SelfAttribute('..output_dir')})
    metrics = factory.Dict({'wall_clock_seconds': factory.Faker('pyfloat', positive=True)})

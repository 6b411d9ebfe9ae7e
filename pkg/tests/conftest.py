import pytest

from hpckg.builder import BuildOptions, SchemaMode, build_graph
from hpckg.fixtures import FixtureParams, generate


@pytest.fixture(scope="session")
def desk_params() -> FixtureParams:
    return FixtureParams(
        seed=7,
        data_centers=2,
        systems_per_dc=1,
        racks_per_system=2,
        nodes_per_rack=3,
        sensors_per_node=3,
        sampling_interval=3600,
        duration=86_400,
        users_per_system=3,
        jobs_per_system=10,
        metrics_per_job=8,
    )


@pytest.fixture(scope="session")
def desk_dataset(desk_params):
    return generate(desk_params)


@pytest.fixture(scope="session")
def unified_store(desk_dataset):
    return build_graph(desk_dataset, BuildOptions(SchemaMode.UNIFIED_URI))

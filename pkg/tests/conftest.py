from pathlib import Path

import pytest

from datahighlights.ingest import DatasetConfig, load_dataset
from datahighlights.query import GroupBySpec, execute_groupby

DATA_DIR = Path(__file__).parent / "data"
CITY_SALES_DIR = DATA_DIR / "city_sales"


@pytest.fixture(scope="session")
def fixture_config():
    return DatasetConfig.from_json_file(CITY_SALES_DIR / "config.json")


@pytest.fixture(scope="session")
def city_sales(fixture_config):
    dataset, registry = load_dataset(fixture_config)
    return dataset, registry


@pytest.fixture(scope="session")
def sales_dataset(city_sales):
    return city_sales[0]


@pytest.fixture(scope="session")
def sales_registry(city_sales):
    return city_sales[1]


@pytest.fixture(scope="session")
def sales_query_spec():
    return GroupBySpec.from_json_file(CITY_SALES_DIR / "query.json")


@pytest.fixture(scope="session")
def sales_resultset(sales_dataset, sales_query_spec):
    return execute_groupby(sales_dataset, sales_query_spec)

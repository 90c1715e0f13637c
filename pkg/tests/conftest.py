"""
Pytest configuration and fixtures for testing.
"""
import sys
from pathlib import Path

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from typing import AsyncGenerator

import pytest
from httpx import ASGITransport, AsyncClient

from app.main import app
from app.dependencies.tables import get_tables
from app.tables import TableRegistry


@pytest.fixture(scope="session")
def tables() -> TableRegistry:
    """
    Fixture that provides one in-memory table registry for the whole session.
    Tables are solved on first use and shared by every test.
    """
    return TableRegistry()


@pytest.fixture
def cached_tables(tmp_path: Path) -> TableRegistry:
    """Fixture that provides a registry writing its tables under a temporary directory."""
    return TableRegistry(tmp_path / "tables")


@pytest.fixture
async def client(tables: TableRegistry) -> AsyncGenerator[AsyncClient, None]:
    """
    Fixture that provides an HTTP client bound to the application.
    The session table registry replaces the process-wide one.
    """
    async def _tables() -> TableRegistry:
        return tables

    app.dependency_overrides[get_tables] = _tables
    try:
        async with AsyncClient(transport=ASGITransport(app=app), base_url="http://test") as ac:
            yield ac
    finally:
        app.dependency_overrides.clear()

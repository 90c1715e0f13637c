from app.tables import TableRegistry, get_table_registry


async def get_tables() -> TableRegistry:
    """Dependency providing the process-wide coefficient table registry."""
    return get_table_registry()

from contextlib import asynccontextmanager

from fastapi import FastAPI, Request, status
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from app.config import settings
from app.exceptions import DensopsError
from app.log import configure_logging
from app.schemas.commands import ErrorResponse
from app.tables import close_table_registry
from app.api import lifts, operators, symbols, tables


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Application lifespan handler."""
    # Startup
    configure_logging()
    yield
    # Shutdown
    close_table_registry()


app = FastAPI(
    title="Densops API",
    description="Exact algebra of differential operators on densities",
    version="0.1.0",
    debug=settings.DEBUG,
    lifespan=lifespan,
)

# CORS Middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.CORS_ORIGINS,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.exception_handler(DensopsError)
async def densops_error_handler(request: Request, exc: DensopsError):
    """Domain errors become 422 with the same envelope the CLI prints."""
    body = ErrorResponse.model_validate({"error": exc.to_dict()})
    return JSONResponse(
        status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
        content=body.model_dump(exclude_none=True),
    )


# Include routers
app.include_router(operators.router)
app.include_router(lifts.router)
app.include_router(symbols.router)
app.include_router(tables.router)


@app.get("/")
async def root():
    """Root endpoint - health check."""
    return {"status": "ok", "message": "Densops API"}


@app.get("/health")
async def health():
    """Health check endpoint."""
    return {"status": "healthy"}

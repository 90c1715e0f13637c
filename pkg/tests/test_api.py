"""
Tests for the HTTP API.
"""
import json

from httpx import AsyncClient


class TestService:
    """Tests for the service endpoints."""

    async def test_root(self, client: AsyncClient):
        """Test the root endpoint."""
        response = await client.get("/")
        assert response.status_code == 200
        assert response.json() == {"status": "ok", "message": "Densops API"}

    async def test_health(self, client: AsyncClient):
        """Test the health endpoint."""
        response = await client.get("/health")
        assert response.status_code == 200
        assert response.json() == {"status": "healthy"}


class TestOperators:
    """Tests for the operator algebra endpoints."""

    async def test_compose(self, client: AsyncClient):
        """Test composing d1 with x1."""
        response = await client.post("/operators/compose", json={"a": "d1", "b": "x1"})
        assert response.status_code == 200
        assert response.json() == {
            "dim": 1,
            "terms": [
                {"coeff": "x1", "alpha": [1], "w": 0},
                {"coeff": "1", "alpha": [0], "w": 0},
            ],
        }

    async def test_adjoint(self, client: AsyncClient):
        """Test the adjoint of the weight operator."""
        response = await client.post("/operators/adjoint", json={"op": "w"})
        assert response.status_code == 200
        assert response.json()["terms"] == [
            {"coeff": "1", "alpha": [0], "w": 0},
            {"coeff": "-1", "alpha": [0], "w": 1},
        ]

    async def test_restrict_accepts_integer_weight(self, client: AsyncClient):
        """Test that an integer weight is read as a rational."""
        response = await client.post("/operators/restrict", json={"op": "w*d1", "lam": 3})
        assert response.status_code == 200
        assert response.json()["terms"] == [{"coeff": "3", "alpha": [1], "w": 0}]

    async def test_apply(self, client: AsyncClient):
        """Test applying an operator to a density of weight 1."""
        response = await client.post("/operators/apply", json={"op": "x1*d1 + w", "density": "x1^3@1"})
        assert response.status_code == 200
        assert response.json() == {"dim": 1, "parts": [{"poly": "4*x1^3", "weight": "1"}]}


class TestLifts:
    """Tests for the lifting endpoints."""

    async def test_canonical2(self, client: AsyncClient):
        """Test the canonical lift with the method taken from the path."""
        response = await client.post("/lifts/canonical2", json={"op": "x1*d1*d1", "lam": "2"})
        assert response.status_code == 200
        assert response.json()["terms"] == [
            {"coeff": "x1", "alpha": [2], "w": 0},
            {"coeff": "4/3", "alpha": [1], "w": 0},
            {"coeff": "-2/3", "alpha": [1], "w": 1},
        ]

    async def test_first_order(self, client: AsyncClient):
        """Test the [0:1] member of the first-order family."""
        response = await client.post("/lifts/first-order", json={"op": "x1*d1", "lam": "2"})
        assert response.status_code == 200
        assert response.json()["terms"] == [
            {"coeff": "x1", "alpha": [1], "w": 0},
            {"coeff": "-2", "alpha": [0], "w": 0},
            {"coeff": "1", "alpha": [0], "w": 1},
        ]

    async def test_dlo_restricts_to_input(self, client: AsyncClient):
        """Test that the projective pencil of d1^2 contains d1^2 at w = lambda."""
        response = await client.post("/lifts/dlo", json={"op": "d1^2", "lam": "1/3"})
        assert response.status_code == 200
        restricted = await client.post(
            "/operators/restrict",
            json={"op": json.dumps(response.json()), "lam": "1/3"},
        )
        assert restricted.json()["terms"] == [{"coeff": "1", "alpha": [2], "w": 0}]

    async def test_decompose(self, client: AsyncClient):
        """Test that the pieces come from the top order down."""
        response = await client.post("/lifts/decompose", json={"op": "d1^2 + x1", "lam": "2"})
        assert response.status_code == 200
        body = response.json()
        assert body["lam"] == "2"
        assert len(body["components"]) == 3

    async def test_singular_weight(self, client: AsyncClient):
        """Test the error envelope for weight 1/2."""
        response = await client.post("/lifts/canonical2", json={"op": "d1^2", "lam": "1/2"})
        assert response.status_code == 422
        assert response.json()["error"]["code"] == "E_SINGULAR_WEIGHT"

    async def test_unknown_method(self, client: AsyncClient):
        """Test that an unknown method is a parse error."""
        response = await client.post("/lifts/magic", json={"op": "d1", "lam": "2"})
        assert response.status_code == 422
        assert response.json()["error"]["code"] == "E_PARSE"

    async def test_parse_error_position(self, client: AsyncClient):
        """Test that parse errors report line and column."""
        response = await client.post("/operators/adjoint", json={"op": "(x1 + 1"})
        assert response.status_code == 422
        error = response.json()["error"]
        assert (error["line"], error["column"]) == (1, 8)


class TestSymbols:
    """Tests for the symbol endpoints."""

    async def test_quantize_example(self, client: AsyncClient):
        """Test quantizing x1^2 xi1^2 at weight 1."""
        response = await client.post("/symbols/quantize", json={"symbol": "x1^2*xi1^2", "mu": "1"})
        assert response.status_code == 200
        assert response.json()["terms"] == [
            {"coeff": "x1^2", "alpha": [2], "w": 0},
            {"coeff": "3*x1", "alpha": [1], "w": 0},
            {"coeff": "1", "alpha": [0], "w": 0},
        ]

    async def test_schwarzian(self, client: AsyncClient):
        """Test the invariant scalar of x1^4 d1^2 at weight 1."""
        response = await client.post("/symbols/schwarzian", json={"op": "x1^4*d1^2", "lam": "1"})
        assert response.status_code == 200
        assert response.json() == {"dim": 1, "poly": "12*x1^2"}


class TestTables:
    """Tests for the coefficient table endpoint."""

    async def test_get_table(self, client: AsyncClient):
        """Test the order-2 table in dimension 1."""
        response = await client.get("/tables/1/2")
        assert response.status_code == 200
        body = response.json()
        assert body["dim"] == 1
        assert body["n"] == 2
        assert body["c"][1][1] == ["0", "-1"]

    async def test_verify(self, client: AsyncClient):
        """Test re-solving a table on request."""
        response = await client.get("/tables/1/1", params={"verify": "true"})
        assert response.status_code == 200

    async def test_bounds(self, client: AsyncClient):
        """Test that a zero dimension fails validation."""
        response = await client.get("/tables/0/2")
        assert response.status_code == 422


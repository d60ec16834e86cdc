import pytest
from fastapi.testclient import TestClient

from src.app import app

ENV = {"eta": 0.1, "gamma": 0.3, "noise_sd": 0.5, "samples_per_period": 6, "seed": 2}


@pytest.fixture
def client():
    with TestClient(app) as test_client:
        yield test_client


class TestSystem:
    def test_root(self, client):
        response = client.get("/")
        assert response.status_code == 200
        assert response.json()["message"] == "ATOMS Lab"

    def test_health(self, client):
        response = client.get("/health")
        assert response.status_code == 200
        assert response.json()["status"] == "healthy"
        assert response.json()["workers"] >= 1
        assert "X-Request-ID" in response.headers


class TestRegistry:
    def test_families(self, client):
        families = client.get("/registry/families").json()["families"]
        assert sorted(f["name"] for f in families) == ["elastic_net", "lasso", "random_forest", "ridge"]

    def test_selectors(self, client):
        selectors = client.get("/registry/selectors").json()["selectors"]
        assert "ATOMS" in selectors

    def test_default_grid(self, client):
        grid = client.get("/registry/grid").json()
        assert grid["count"] == 168
        assert len(grid["candidates"]) == 168
        assert len(grid["specifications"]) * len(grid["window_exponents"]) == 168


class TestExperiments:
    def test_simulate(self, client):
        response = client.post("/experiments/simulate", json={"env": ENV, "periods": 4, "include_csv": True})
        assert response.status_code == 200
        body = response.json()
        assert (body["periods"], body["dimension"], body["observations"]) == (4, 1, 24)
        assert body["csv"].splitlines()[0] == "period,x1,y"
        assert len(body["csv"].splitlines()) == 25

    def test_complexity(self, client):
        response = client.post("/experiments/complexity", json={"lambdas": [1, 2], "trials": 5})
        assert response.status_code == 200
        assert response.json()["mean_comparisons"] == {"1": 0.0, "2": 1.0}

    def test_duel(self, client):
        body = {
            "data": {"synth": {"env": ENV, "periods": 8}},
            "f1": "ridge:alpha=1,k=1",
            "f2": "lasso:alpha=0.01",
            "t": 6,
        }
        response = client.post("/experiments/duel", json=body)
        assert response.status_code == 200
        table = response.json()
        assert table["t"] == 6
        assert {table["winner"], table["loser"]} == {1, 2}
        assert [row["ell"] for row in table["rows"]] == [1, 2, 3, 4, 5]

    def test_bad_specification_is_a_client_error(self, client):
        body = {"data": {"synth": {"env": ENV, "periods": 8}}, "f1": "svm:c=1", "f2": "ridge:alpha=1"}
        response = client.post("/experiments/duel", json=body)
        assert response.status_code == 400
        assert response.json()["type"] == "ConfigurationError"

    def test_invalid_body(self, client):
        response = client.post("/experiments/simulate", json={"env": ENV, "periods": 0})
        assert response.status_code == 422

    def test_backtest(self, client):
        body = {
            "data": {"synth": {"env": ENV, "periods": 6}},
            "seeds": [0],
            "grid": {
                "ridge_alphas": [1.0],
                "lasso_alphas": [],
                "enet_alphas": [],
                "enet_l1_ratios": [],
                "forest_n_trees": [],
                "forest_max_depths": [],
                "window_exponents": [0, 1],
            },
            "selectors": [{"kind": "atoms_mse"}, {"kind": "fixed_val", "window": 2}],
            "use_nber_regimes": False,
            "true_risk_samples": 50,
            "threads": 1,
        }
        response = client.post("/experiments/backtest", json=body)
        assert response.status_code == 200
        payload = response.json()
        assert payload["selectors"] == ["ATOMS", "Fixed-val(2)"]
        assert payload["evaluation"]["first_period"] == 3

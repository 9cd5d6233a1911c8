"""Synthetic market command."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

from grmkit.engine.panel import write_returns
from grmkit.engine.synth import SyntheticSpec, SyntheticTruth, generate
from grmkit.errors import IoFailureError, UsageError
from grmkit.tools.workspace import Workspace

logger = logging.getLogger(__name__)


def truth_to_dict(truth: SyntheticTruth) -> dict[str, Any]:
    data: dict[str, Any] = {"sigma": truth.sigma.tolist()}
    if truth.omega is not None:
        data["omega"] = truth.omega.tolist()
        data["edges"] = [list(e) for e in truth.edges]
    for key in ("B", "V", "delta"):
        value = getattr(truth, key)
        if value is not None:
            data[key] = value.tolist()
    return data


class SynthTools:
    """Generate reproducible synthetic markets."""

    def __init__(self, workspace: Workspace):
        self.workspace = workspace

    def synth(
        self,
        spec: str | Path | None,
        out: str | Path = "returns.csv",
        seed: int | None = None,
    ) -> dict[str, Any]:
        """Sample a market from a JSON recipe.

        Args:
            spec: SyntheticSpec JSON file
            out: Returns CSV to write
            seed: Overrides the seed of the recipe

        Returns:
            Status, panel shape and written files
        """
        path = self.workspace.require(spec, "--spec")
        try:
            with open(path) as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise IoFailureError(f"Cannot read synthetic spec {path}: {e}") from e
        if not isinstance(data, dict):
            raise UsageError(f"{path} must hold a JSON object")
        if seed is not None:
            data["seed"] = seed
        else:
            data.setdefault("seed", self.workspace.config.seed)

        recipe = SyntheticSpec.from_dict(data)
        panel, truth = generate(recipe)

        returns_path = write_returns(panel, self.workspace.path(out))
        outputs = [returns_path]
        stem = Path(out).stem
        if truth.factors is not None:
            factors_path = self.workspace.path(Path(out).with_name(f"{stem}_factors.csv"))
            outputs.append(write_returns(truth.factors, factors_path))
        outputs.append(
            self.workspace.write_json(
                Path(out).with_name(f"{stem}_truth.json"),
                {"spec": recipe.to_dict(), "truth": truth_to_dict(truth)},
            )
        )
        logger.info("Sampled %s market with seed %d", recipe.structure.value, recipe.seed)
        return {
            "status": "generated",
            "p": panel.p,
            "n": panel.n,
            "seed": recipe.seed,
            "outputs": [str(p) for p in outputs],
        }

import json

import numpy as np
import pytest

from palette_orchestra.color import PaletteSet
from palette_orchestra.dataio import (
    dataset_from_dict,
    load_dataset,
    load_model,
    save_dataset,
)


class TestDatasetFormat:
    def test_round_trip(self, tmp_path, rng):
        ps = PaletteSet(rng.random((7, 5, 3)))
        path = tmp_path / "d.json"
        save_dataset(path, ps)
        doc = json.loads(path.read_text())
        assert doc["k"] == 5
        assert doc["colors_space"] == "lab01"
        assert len(doc["palettes"]) == 7
        loaded, prov = load_dataset(path)
        assert prov is None
        assert np.abs(loaded.colors - ps.colors).max() < 1e-15

    def test_provenance_round_trip(self, tmp_path, rng):
        ps = PaletteSet(rng.random((3, 4, 3)))
        prov = np.stack([np.random.default_rng(i).permutation(4) for i in range(3)])
        path = tmp_path / "s.json"
        save_dataset(path, ps, provenance=prov)
        _, loaded_prov = load_dataset(path)
        assert np.array_equal(loaded_prov, prov)

    def test_unknown_color_space_rejected(self):
        with pytest.raises(ValueError):
            dataset_from_dict({"k": 1, "colors_space": "rgb", "palettes": [[[0, 0, 0]]]})

    def test_k_mismatch_rejected(self):
        with pytest.raises(ValueError):
            dataset_from_dict({"k": 2, "colors_space": "lab01", "palettes": [[[0.1, 0.2, 0.3]]]})


class TestModelFormat:
    def test_unknown_type_rejected(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"format_version": 1, "type": "mystery"}))
        with pytest.raises(ValueError, match="unknown model type"):
            load_model(path)

    def test_unknown_version_rejected(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"format_version": 99, "type": "gplvm"}))
        with pytest.raises(ValueError, match="format_version"):
            load_model(path)

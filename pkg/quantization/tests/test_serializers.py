import pytest

from quantization.serializers import (
    FormEntrySerializer,
    GaugeSerializer,
    ModelFileSerializer,
    RMatrixEntrySerializer,
)


@pytest.fixture
def model_data():
    return {
        "name": "heisenberg",
        "dim": 3,
        "cartan_dim": 1,
        "basis": ["h", "e1", "e2"],
        "brackets": [{"i": 1, "j": 2, "k": 0, "c": "1"}],
        "r": [{"i": 1, "j": 2, "coeff": "1/l1"}],
    }


class TestModelFileSerializer:
    """Tests for the model file schema."""

    def test_valid_model(self, model_data):
        serializer = ModelFileSerializer(data=model_data)
        assert serializer.is_valid(), serializer.errors
        assert serializer.validated_data["weyl_curvature"] == []
        assert serializer.validated_data["brackets"][0]["c"] == "1"

    def test_optional_sections_default_to_empty(self, model_data):
        del model_data["brackets"]
        del model_data["r"]
        serializer = ModelFileSerializer(data=model_data)
        assert serializer.is_valid(), serializer.errors
        assert serializer.validated_data["brackets"] == []
        assert serializer.validated_data["r"] == []

    def test_cartan_dim_exceeds_dim(self, model_data):
        model_data["cartan_dim"] = 4
        serializer = ModelFileSerializer(data=model_data)
        assert not serializer.is_valid()
        assert "cartan_dim" in serializer.errors

    def test_duplicate_labels(self, model_data):
        model_data["basis"] = ["h", "e", "e"]
        serializer = ModelFileSerializer(data=model_data)
        assert not serializer.is_valid()
        assert serializer.errors["basis"] == ["basis labels must be distinct"]

    def test_index_errors_name_the_entry(self, model_data):
        model_data["r"] = [{"i": 1, "j": 2, "coeff": "1"}, {"i": 0, "j": 3, "coeff": "1"}]
        serializer = ModelFileSerializer(data=model_data)
        assert not serializer.is_valid()
        assert list(serializer.errors["r"]) == [1]
        assert "j" in serializer.errors["r"][1]

    def test_weyl_curvature_indices_use_the_frame_size(self, model_data):
        """Test Weyl curvature indices run over the l + n frame of M."""
        model_data["weyl_curvature"] = [[{"A": 2, "B": 3, "coeff": "1"}]]
        assert ModelFileSerializer(data=model_data).is_valid()
        model_data["weyl_curvature"] = [[{"A": 2, "B": 4, "coeff": "1"}]]
        serializer = ModelFileSerializer(data=model_data)
        assert not serializer.is_valid()
        assert "weyl_curvature" in serializer.errors

    def test_gauge_index(self, model_data):
        model_data["gauge"] = {"log": [{"a": 3, "coeff": "l1"}]}
        serializer = ModelFileSerializer(data=model_data)
        assert not serializer.is_valid()
        assert "gauge" in serializer.errors

    def test_negative_index(self, model_data):
        model_data["brackets"] = [{"i": -1, "j": 2, "k": 0, "c": "1"}]
        assert not ModelFileSerializer(data=model_data).is_valid()


class TestEntrySerializers:
    def test_r_entry_needs_distinct_indices(self):
        serializer = RMatrixEntrySerializer(data={"i": 1, "j": 1, "coeff": "1"})
        assert not serializer.is_valid()
        assert "non_field_errors" in serializer.errors

    def test_form_entry(self):
        assert FormEntrySerializer(data={"A": 0, "B": 1, "coeff": "l1"}).is_valid()

    def test_gauge_nilpotency_is_optional(self):
        serializer = GaugeSerializer(data={"log": [{"a": 1, "coeff": "l1"}]})
        assert serializer.is_valid(), serializer.errors

    def test_gauge_nilpotency_positive(self):
        serializer = GaugeSerializer(data={"log": [], "nilpotency": 0})
        assert not serializer.is_valid()

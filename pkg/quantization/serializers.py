import logging
from rest_framework import serializers

logger = logging.getLogger(__name__)


class BracketEntrySerializer(serializers.Serializer):
    """One structure constant c_{ij}^k."""

    i = serializers.IntegerField(min_value=0)
    j = serializers.IntegerField(min_value=0)
    k = serializers.IntegerField(min_value=0)
    c = serializers.CharField()


class RMatrixEntrySerializer(serializers.Serializer):
    """Coefficient of e_i ^ e_j in r(l)."""

    i = serializers.IntegerField(min_value=0)
    j = serializers.IntegerField(min_value=0)
    coeff = serializers.CharField()

    def validate(self, data):
        if data["i"] == data["j"]:
            raise serializers.ValidationError("r entry needs i != j")
        return data


class FormEntrySerializer(serializers.Serializer):
    """Component of a 2-form in the coframe of M."""

    A = serializers.IntegerField(min_value=0)
    B = serializers.IntegerField(min_value=0)
    coeff = serializers.CharField()


class GaugeLogEntrySerializer(serializers.Serializer):
    a = serializers.IntegerField(min_value=0)
    coeff = serializers.CharField()


class GaugeSerializer(serializers.Serializer):
    log = GaugeLogEntrySerializer(many=True)
    nilpotency = serializers.IntegerField(min_value=1, required=False, allow_null=True)


class ModelFileSerializer(serializers.Serializer):
    """
    Schema of a model file. Scalar strings are only checked for presence
    here; ModelLoader parses them.
    """

    name = serializers.CharField()
    dim = serializers.IntegerField(min_value=1)
    cartan_dim = serializers.IntegerField(min_value=0)
    basis = serializers.ListField(child=serializers.CharField())
    brackets = BracketEntrySerializer(many=True, required=False, default=list)
    r = RMatrixEntrySerializer(many=True, required=False, default=list)
    weyl_curvature = serializers.ListField(
        child=FormEntrySerializer(many=True), required=False, default=list
    )
    gauge = GaugeSerializer(required=False, allow_null=True)
    base_point = serializers.ListField(
        child=serializers.CharField(), required=False, allow_null=True
    )

    def validate(self, data):
        dim = data["dim"]
        cartan_dim = data["cartan_dim"]
        errors = {}

        if cartan_dim > dim:
            errors["cartan_dim"] = [f"cartan_dim {cartan_dim} exceeds dim {dim}"]
        if len(data["basis"]) != dim:
            errors["basis"] = [f"expected {dim} labels, got {len(data['basis'])}"]
        elif len(set(data["basis"])) != dim:
            errors["basis"] = ["basis labels must be distinct"]

        bracket_errors = self._index_errors(data["brackets"], ("i", "j", "k"), dim)
        if bracket_errors:
            errors["brackets"] = bracket_errors
        r_errors = self._index_errors(data["r"], ("i", "j"), dim)
        if r_errors:
            errors["r"] = r_errors

        frame_size = cartan_dim + dim
        curvature_errors = {}
        for order, entries in enumerate(data["weyl_curvature"]):
            entry_errors = self._index_errors(entries, ("A", "B"), frame_size)
            if entry_errors:
                curvature_errors[order] = entry_errors
        if curvature_errors:
            errors["weyl_curvature"] = curvature_errors

        gauge = data.get("gauge")
        if gauge:
            gauge_errors = self._index_errors(gauge["log"], ("a",), dim)
            if gauge_errors:
                errors["gauge"] = {"log": gauge_errors}

        base_point = data.get("base_point")
        if base_point is not None and len(base_point) != cartan_dim:
            errors["base_point"] = [f"expected {cartan_dim} coordinates, got {len(base_point)}"]

        if errors:
            logger.info(f"Model file {data.get('name')} failed validation: {errors}")
            raise serializers.ValidationError(errors)
        return data

    @staticmethod
    def _index_errors(entries, fields, bound):
        """Map entry position -> field errors for indices outside 0..bound-1."""
        errors = {}
        for position, entry in enumerate(entries):
            bad = {
                name: [f"index {entry[name]} outside 0..{bound - 1}"]
                for name in fields
                if entry[name] >= bound
            }
            if bad:
                errors[position] = bad
        return errors

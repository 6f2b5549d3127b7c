from django.apps import AppConfig


class QuantizationConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "quantization"
    verbose_name = "Dynamical r-matrix quantization"

import uuid
from django.db import models


class ModelRun(models.Model):
    """Audit record of one command run against a model file."""

    id = models.UUIDField(primary_key=True, default=uuid.uuid4, editable=False)
    model_name = models.CharField(max_length=255)
    command = models.CharField(max_length=32)
    options = models.JSONField(default=dict, help_text="Command flags the run was started with")
    caps = models.JSONField(default=dict, help_text="Truncation caps used by the run")
    passed = models.BooleanField(default=False)
    report = models.JSONField(default=dict, help_text="Machine-readable report of the run")
    runtime_ms = models.IntegerField(default=0)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ["-created_at"]
        indexes = [
            models.Index(fields=["model_name", "command"]),
        ]

    def __str__(self):
        status = "pass" if self.passed else "fail"
        return f"{self.command} on {self.model_name} ({status})"

    def __repr__(self):
        return f"<ModelRun: {self.command} {self.model_name} passed={self.passed}>"

    @property
    def failed_checks(self):
        return [
            check["name"]
            for check in self.report.get("checks", [])
            if check.get("status") != "pass"
        ]

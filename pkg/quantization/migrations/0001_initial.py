# Generated by Django 4.2.23 on 2026-10-18 09:12

from django.db import migrations, models
import uuid


class Migration(migrations.Migration):
    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="ModelRun",
            fields=[
                (
                    "id",
                    models.UUIDField(
                        default=uuid.uuid4,
                        editable=False,
                        primary_key=True,
                        serialize=False,
                    ),
                ),
                ("model_name", models.CharField(max_length=255)),
                ("command", models.CharField(max_length=32)),
                (
                    "options",
                    models.JSONField(
                        default=dict, help_text="Command flags the run was started with"
                    ),
                ),
                (
                    "caps",
                    models.JSONField(
                        default=dict, help_text="Truncation caps used by the run"
                    ),
                ),
                ("passed", models.BooleanField(default=False)),
                (
                    "report",
                    models.JSONField(
                        default=dict, help_text="Machine-readable report of the run"
                    ),
                ),
                ("runtime_ms", models.IntegerField(default=0)),
                ("created_at", models.DateTimeField(auto_now_add=True)),
            ],
            options={
                "ordering": ["-created_at"],
                "indexes": [
                    models.Index(
                        fields=["model_name", "command"],
                        name="quantizatio_model_n_5f1c2e_idx",
                    )
                ],
            },
        ),
    ]

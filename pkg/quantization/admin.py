from django.contrib import admin
from .models import ModelRun


@admin.register(ModelRun)
class ModelRunAdmin(admin.ModelAdmin):
    list_display = ("model_name", "command", "passed", "runtime_ms", "created_at")
    list_filter = ("command", "passed", "created_at")
    search_fields = ("model_name", "command")
    readonly_fields = ("id", "created_at", "report", "caps", "options")
    ordering = ("-created_at",)

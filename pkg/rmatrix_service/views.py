from django.db import connection
from django.http import JsonResponse

from quantization.models import ModelRun


def health_check(request):
    """Health check endpoint reporting database connectivity and recorded runs."""
    status = {"status": "healthy", "database": "unknown", "recorded_runs": None}

    try:
        with connection.cursor() as cursor:
            cursor.execute("SELECT 1")
        status["database"] = "connected"
        status["recorded_runs"] = ModelRun.objects.count()
    except Exception as e:
        status["database"] = f"error: {str(e)}"
        status["status"] = "unhealthy"

    return JsonResponse(status)

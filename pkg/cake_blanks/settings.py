"""
Django settings for the cake_blanks project.

The project has no web surface; Django supplies configuration, the
management-command CLI and the test runner.
"""

import os
from pathlib import Path

from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

load_dotenv(BASE_DIR / ".env")

SECRET_KEY = os.environ.get("SECRET_KEY", "cake-blanks-local-only")

DEBUG = False

ALLOWED_HOSTS = ["localhost", "127.0.0.1"]

# Application definition

INSTALLED_APPS = [
    'arrangements',
    'analysis',
]

# Commands and tests never touch a database.
DATABASES = {}

USE_TZ = True

# Fuzzing / rendering
BLANKS_SEED = os.environ.get("BLANKS_SEED")
BLANKS_FUZZ_WORKERS = int(os.environ.get("BLANKS_FUZZ_WORKERS", "1"))
BLANKS_SVG_WIDTH = int(os.environ.get("BLANKS_SVG_WIDTH", "480"))
BLANKS_FAILURE_DIR = Path(os.environ.get("BLANKS_FAILURE_DIR", "."))
BLANKS_LOG_LEVEL = os.environ.get("BLANKS_LOG_LEVEL", "WARNING")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {"format": "%(levelname)s %(name)s: %(message)s"},
    },
    "handlers": {
        "console": {"class": "logging.StreamHandler", "formatter": "plain"},
    },
    "loggers": {
        "arrangements": {"handlers": ["console"], "level": BLANKS_LOG_LEVEL},
        "analysis": {"handlers": ["console"], "level": BLANKS_LOG_LEVEL},
    },
}

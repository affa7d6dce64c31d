import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "cake_blanks.settings")
django.setup()

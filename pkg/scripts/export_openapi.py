"""Write the service's OpenAPI schema to openapi.json at the repo root."""

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from fluidrec.service import create_app  # noqa: E402


def main() -> None:
    app = create_app()
    out = ROOT / "openapi.json"
    out.write_text(json.dumps(app.openapi(), indent=2, sort_keys=True) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()

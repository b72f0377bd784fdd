"""External black-box evaluators speaking line-delimited JSON over stdio."""

from __future__ import annotations

import json
import logging
import subprocess
import time
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from mixed_sego.core.errors import EvaluationError
from mixed_sego.core.models import MixedPoint

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExternalBlackBox:
    """Run ``command`` once per point, send one request line and read one response line.

    Request: ``{"point": {"x": [...], "z": [...], "c": [...]}}``.
    Response: ``{"f": <real>, "g": [<real>, ...]}``.
    A fresh process per evaluation keeps instances safe to share between runs.
    """

    command: Tuple[str, ...]
    n_constraints: int = 0
    timeout_seconds: float = 60.0
    max_retries: int = 1
    retry_delay: float = 0.5

    @classmethod
    def from_command(
        cls,
        command: Sequence[str],
        n_constraints: int = 0,
        timeout_seconds: float = 60.0,
        max_retries: int = 1,
    ) -> "ExternalBlackBox":
        if not command:
            raise EvaluationError("black-box command is empty")
        return cls(
            tuple(str(part) for part in command), n_constraints, timeout_seconds, max_retries
        )

    def _run_once(self, request: str) -> Dict[str, Any]:
        try:
            completed = subprocess.run(
                list(self.command),
                input=request + "\n",
                capture_output=True,
                text=True,
                timeout=self.timeout_seconds,
                check=False,
            )
        except subprocess.TimeoutExpired as exc:
            raise EvaluationError(f"black-box timed out after {self.timeout_seconds}s") from exc
        except OSError as exc:
            raise EvaluationError(f"could not start black-box {self.command[0]!r}: {exc}") from exc

        if completed.returncode != 0:
            stderr = completed.stderr.strip().splitlines()
            detail = stderr[-1] if stderr else "no stderr"
            raise EvaluationError(f"black-box exited with code {completed.returncode}: {detail}")

        lines = [line for line in completed.stdout.splitlines() if line.strip()]
        if not lines:
            raise EvaluationError("black-box produced no response line")
        try:
            payload = json.loads(lines[0])
        except json.JSONDecodeError as exc:
            raise EvaluationError(f"malformed black-box response: {exc}") from exc
        if not isinstance(payload, dict):
            raise EvaluationError("black-box response must be a JSON object")
        return payload

    def _parse(self, payload: Dict[str, Any]) -> Tuple[float, Tuple[float, ...]]:
        try:
            f = float(payload["f"])
            g_raw: List[Any] = list(payload.get("g", []))
            g = tuple(float(value) for value in g_raw)
        except (KeyError, TypeError, ValueError) as exc:
            raise EvaluationError(f"malformed black-box response: {exc}") from exc
        if len(g) != self.n_constraints:
            raise EvaluationError(
                f"black-box returned {len(g)} constraint values, expected {self.n_constraints}"
            )
        return f, g

    def __call__(self, point: MixedPoint) -> Tuple[float, Tuple[float, ...]]:
        request = json.dumps({"point": point.to_dict()})
        last_error: Optional[Exception] = None
        for attempt in range(1, self.max_retries + 1):
            try:
                return self._parse(self._run_once(request))
            except EvaluationError as exc:
                last_error = exc
                if attempt >= self.max_retries:
                    break
                logger.warning("Black-box attempt %d failed: %s; retrying", attempt, exc)
                time.sleep(self.retry_delay)
        raise EvaluationError(f"black-box evaluation failed: {last_error}")

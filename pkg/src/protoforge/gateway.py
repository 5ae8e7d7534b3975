"""Single choke point for model interactions.

Builds requests from templates, dispatches them to a live provider or a
record/replay transcript store, and digs structured content out of
free-text completions. Everything upstream of this module is plain state;
everything nondeterministic funnels through here.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Callable, Iterator, Mapping, Protocol

DEFAULT_CALL_BUDGET = 200

# Per-role defaults. Ideation answers are short lists; codegen returns a
# whole document and gets the full cap.
DEFAULT_TOKEN_CAPS = {"ideation": 1024, "codegen": 4096}
DEFAULT_TEMPERATURES = {"ideation": 0.7, "codegen": 0.2}


class ModelRole(Enum):
    IDEATION = "ideation"
    CODEGEN = "codegen"


class GatewayError(Exception):
    """Base class for everything raised by this module."""


class MissingPlaceholder(GatewayError):
    def __init__(self, name: str):
        super().__init__(f"template placeholder {{{name}}} has no binding")
        self.name = name


class UnknownPlaceholder(GatewayError):
    def __init__(self, name: str):
        super().__init__(f"binding {name!r} is not a declared placeholder")
        self.name = name


class ParseFailure(GatewayError):
    """A completion could not be parsed into the expected structure."""


class NoArrayFound(ParseFailure):
    def __init__(self):
        super().__init__("no JSON array found in completion")


class MalformedArray(ParseFailure):
    def __init__(self, position: int):
        super().__init__(f"unparseable array starting at offset {position}")
        self.position = position


class ProviderError(GatewayError):
    def __init__(self, status: int, body: str):
        super().__init__(f"provider returned status {status}")
        self.status = status
        self.body = body


class GatewayTimeout(GatewayError):
    def __init__(self, deadline: float):
        super().__init__(f"provider did not answer within {deadline:.0f}s")
        self.deadline = deadline


class ReplayMiss(GatewayError):
    def __init__(self, digest: str):
        super().__init__(f"no stored completion for request digest {digest}")
        self.digest = digest


class BudgetExceeded(GatewayError):
    def __init__(self, budget: int):
        super().__init__(f"per-project call budget of {budget} completions exhausted")
        self.budget = budget


@dataclass(frozen=True)
class PromptTemplate:
    """A named pair of system/user texts with declared placeholders.

    Only declared placeholders are substituted; any other brace-wrapped
    token in the text (JSON literals, code snippets) is left untouched.
    """

    name: str
    role: ModelRole
    system_text: str
    user_text: str
    placeholders: frozenset[str]


@dataclass(frozen=True)
class PromptRequest:
    role: ModelRole
    rendered_system: str
    rendered_user: str
    max_output_tokens: int
    temperature: float


@dataclass(frozen=True)
class CompletionResult:
    text: str
    provider_model_id: str
    input_tokens: int
    output_tokens: int
    truncated: bool


@dataclass(frozen=True)
class TranscriptRecord:
    sequence_number: int
    request_digest: str
    request: PromptRequest
    result: CompletionResult
    created_at: str


def render(
    template: PromptTemplate,
    bindings: Mapping[str, str],
    *,
    max_output_tokens: int | None = None,
    temperature: float | None = None,
) -> PromptRequest:
    """Substitute bindings into a template and produce a dispatchable request.

    Bindings must cover the declared placeholder set exactly. Substitution is
    verbatim, single-pass, with no escaping; placeholder-shaped text inside a
    binding value is not re-expanded.
    """
    declared = set(template.placeholders)
    for name in sorted(declared - set(bindings)):
        raise MissingPlaceholder(name)
    for name in sorted(set(bindings) - declared):
        raise UnknownPlaceholder(name)

    def substitute(text: str) -> str:
        if not declared:
            return text
        pattern = re.compile(
            "|".join(r"\{" + re.escape(name) + r"\}" for name in sorted(declared))
        )
        return pattern.sub(lambda m: str(bindings[m.group(0)[1:-1]]), text)

    role_key = template.role.value
    return PromptRequest(
        role=template.role,
        rendered_system=substitute(template.system_text),
        rendered_user=substitute(template.user_text),
        max_output_tokens=(
            max_output_tokens
            if max_output_tokens is not None
            else DEFAULT_TOKEN_CAPS[role_key]
        ),
        temperature=(
            temperature if temperature is not None else DEFAULT_TEMPERATURES[role_key]
        ),
    )


def request_digest(request: PromptRequest) -> str:
    """Content hash identifying a request for replay matching.

    Covers role, both rendered texts, and temperature; deliberately not the
    token cap, so cap tweaks do not orphan recorded fixtures.
    """
    payload = json.dumps(
        [
            request.role.value,
            request.rendered_system,
            request.rendered_user,
            request.temperature,
        ],
        ensure_ascii=False,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


# --- completion parsing ----------------------------------------------------

_FENCE_RE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)
_TRAILING_COMMA_RE = re.compile(r",(\s*[\]}])")


def _scan_balanced_array(text: str, start: int) -> int | None:
    """Return the end offset (exclusive) of the array opening at `start`.

    Bracket counting is string-aware so brackets inside JSON strings do not
    unbalance the scan. Returns None when the array never closes.
    """
    depth = 0
    in_string = False
    escaped = False
    for i in range(start, len(text)):
        ch = text[i]
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth == 0:
                return i + 1
    return None


def _try_parse_array(candidate: str) -> list | None:
    try:
        value = json.loads(candidate)
    except ValueError:
        # Models copy the trailing-comma style of the few-shot examples;
        # tolerate it before giving up.
        try:
            value = json.loads(_TRAILING_COMMA_RE.sub(r"\1", candidate))
        except ValueError:
            return None
    return value if isinstance(value, list) else None


def extract_json_array(text: str) -> list:
    """Find the first maximal well-formed JSON array in free-form model output.

    Fenced code blocks are searched before the raw text, since models tend to
    wrap structured answers in fences no matter what the prompt says. Raises
    NoArrayFound when the text has no '[' at all, MalformedArray when brackets
    exist but never parse.
    """
    sources: list[tuple[int, str]] = []
    for match in _FENCE_RE.finditer(text):
        sources.append((match.start(1), match.group(1)))
    sources.append((0, text))

    first_bracket: int | None = None
    for base, source in sources:
        idx = source.find("[")
        while idx != -1:
            if first_bracket is None:
                first_bracket = base + idx
            end = _scan_balanced_array(source, idx)
            if end is not None:
                value = _try_parse_array(source[idx:end])
                if value is not None:
                    return value
            idx = source.find("[", idx + 1)

    if first_bracket is None:
        raise NoArrayFound()
    raise MalformedArray(first_bracket)


# --- transcript persistence -------------------------------------------------


def _record_to_dict(record: TranscriptRecord) -> dict:
    return {
        "sequence_number": record.sequence_number,
        "request_digest": record.request_digest,
        "request": {
            "role": record.request.role.value,
            "rendered_system": record.request.rendered_system,
            "rendered_user": record.request.rendered_user,
            "max_output_tokens": record.request.max_output_tokens,
            "temperature": record.request.temperature,
        },
        "result": {
            "text": record.result.text,
            "provider_model_id": record.result.provider_model_id,
            "input_tokens": record.result.input_tokens,
            "output_tokens": record.result.output_tokens,
            "truncated": record.result.truncated,
        },
        "created_at": record.created_at,
    }


def _record_from_dict(data: dict) -> TranscriptRecord:
    req = data["request"]
    res = data["result"]
    return TranscriptRecord(
        sequence_number=data["sequence_number"],
        request_digest=data["request_digest"],
        request=PromptRequest(
            role=ModelRole(req["role"]),
            rendered_system=req["rendered_system"],
            rendered_user=req["rendered_user"],
            max_output_tokens=req["max_output_tokens"],
            temperature=req["temperature"],
        ),
        result=CompletionResult(
            text=res["text"],
            provider_model_id=res["provider_model_id"],
            input_tokens=res["input_tokens"],
            output_tokens=res["output_tokens"],
            truncated=res["truncated"],
        ),
        created_at=data["created_at"],
    )


class TranscriptStore:
    """Append-only, newline-delimited transcript file for one project."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._records: list[TranscriptRecord] = []
        if self.path.exists():
            self._records = list(read_transcript(self.path))

    @property
    def records(self) -> list[TranscriptRecord]:
        return list(self._records)

    def next_sequence_number(self) -> int:
        return len(self._records) + 1

    def append(self, record: TranscriptRecord) -> None:
        with self._lock:
            line = json.dumps(_record_to_dict(record), ensure_ascii=False)
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(line + "\n")
            self._records.append(record)


def read_transcript(path: Path) -> Iterator[TranscriptRecord]:
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield _record_from_dict(json.loads(line))


class ReplayIndex:
    """Digest-keyed lookup over recorded transcripts.

    Matching is by content digest rather than sequence position, so fixtures
    survive reordering of independent calls. Repeated identical requests all
    resolve to the first stored record for that digest.
    """

    def __init__(self, records: list[TranscriptRecord]):
        self._by_digest: dict[str, TranscriptRecord] = {}
        for record in records:
            self._by_digest.setdefault(record.request_digest, record)

    @classmethod
    def load(cls, path: Path) -> "ReplayIndex":
        """Load one transcript file, or every *.ndjson under a directory.

        Verifies that each stored digest matches its stored request; a
        mismatch means the fixture was edited by hand and cannot be trusted.
        """
        path = Path(path)
        files = sorted(path.glob("**/*.ndjson")) if path.is_dir() else [path]
        records: list[TranscriptRecord] = []
        for file in files:
            for record in read_transcript(file):
                actual = request_digest(record.request)
                if actual != record.request_digest:
                    raise ValueError(
                        f"{file}: stored digest {record.request_digest} does not "
                        f"match its request (expected {actual})"
                    )
                records.append(record)
        return cls(records)

    def lookup(self, digest: str) -> TranscriptRecord | None:
        return self._by_digest.get(digest)

    def __len__(self) -> int:
        return len(self._by_digest)


# --- dispatch ----------------------------------------------------------------


class GatewayMode(Enum):
    LIVE = "live"
    RECORD = "record"
    REPLAY = "replay"


class Provider(Protocol):
    def complete(self, request: PromptRequest) -> CompletionResult: ...


class Gateway:
    """Dispatches prompt requests per the configured mode.

    Live forwards to the provider for the request's role. Record does the
    same and appends a TranscriptRecord to the given store. Replay serves
    results purely from the replay index and never touches a provider.
    Shareable across threads; per-project budgets are tracked internally.
    """

    def __init__(
        self,
        mode: GatewayMode,
        providers: Mapping[ModelRole, Provider] | None = None,
        *,
        replay_index: ReplayIndex | None = None,
        token_caps: Mapping[ModelRole, int] | None = None,
        call_budget: int = DEFAULT_CALL_BUDGET,
        clock: Callable[[], str] | None = None,
    ):
        if mode is GatewayMode.REPLAY and replay_index is None:
            raise ValueError("replay mode requires a loaded replay index")
        self.mode = mode
        self.providers = dict(providers or {})
        self.replay_index = replay_index
        self.token_caps = {
            ModelRole.IDEATION: DEFAULT_TOKEN_CAPS["ideation"],
            ModelRole.CODEGEN: DEFAULT_TOKEN_CAPS["codegen"],
        }
        if token_caps:
            self.token_caps.update(token_caps)
        self.call_budget = call_budget
        self._spent: dict[str, int] = {}
        self._budget_lock = threading.Lock()
        self._clock = clock or (lambda: datetime.now(timezone.utc).isoformat())

    def _validate(self, request: PromptRequest) -> None:
        if request.max_output_tokens <= 0:
            raise ValueError("max_output_tokens must be positive")
        cap = self.token_caps[request.role]
        if request.max_output_tokens > cap:
            raise ValueError(
                f"max_output_tokens {request.max_output_tokens} exceeds the "
                f"{request.role.value} cap of {cap}"
            )
        if not 0.0 <= request.temperature <= 2.0:
            raise ValueError("temperature must be within [0, 2]")

    def _charge(self, project_id: str | None) -> None:
        key = project_id or ""
        with self._budget_lock:
            spent = self._spent.get(key, 0)
            if spent >= self.call_budget:
                raise BudgetExceeded(self.call_budget)
            self._spent[key] = spent + 1

    def complete(
        self,
        request: PromptRequest,
        *,
        project_id: str | None = None,
        transcript: TranscriptStore | None = None,
    ) -> CompletionResult:
        self._validate(request)
        digest = request_digest(request)

        if self.mode is GatewayMode.REPLAY:
            assert self.replay_index is not None
            record = self.replay_index.lookup(digest)
            if record is None:
                raise ReplayMiss(digest)
            return record.result

        # Live and Record both hit the network and count against the budget.
        self._charge(project_id)
        provider = self.providers.get(request.role)
        if provider is None:
            raise ProviderError(0, f"no provider configured for role {request.role.value}")
        result = provider.complete(request)

        if self.mode is GatewayMode.RECORD and transcript is not None:
            transcript.append(
                TranscriptRecord(
                    sequence_number=transcript.next_sequence_number(),
                    request_digest=digest,
                    request=request,
                    result=result,
                    created_at=self._clock(),
                )
            )
        return result


class HttpChatProvider:
    """Live provider speaking the common chat-completions JSON dialect."""

    def __init__(
        self,
        model_id: str,
        api_key: str,
        *,
        base_url: str = "https://api.openai.com/v1",
        timeout: float = 120.0,
        retries: int = 1,
    ):
        self.model_id = model_id
        self.api_key = api_key
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.retries = retries

    def complete(self, request: PromptRequest) -> CompletionResult:
        import httpx

        body = {
            "model": self.model_id,
            "messages": [
                {"role": "system", "content": request.rendered_system},
                {"role": "user", "content": request.rendered_user},
            ],
            "max_tokens": request.max_output_tokens,
            "temperature": request.temperature,
        }
        last_error: Exception | None = None
        for _ in range(self.retries + 1):
            try:
                response = httpx.post(
                    f"{self.base_url}/chat/completions",
                    json=body,
                    headers={"Authorization": f"Bearer {self.api_key}"},
                    timeout=self.timeout,
                )
            except httpx.TimeoutException:
                last_error = GatewayTimeout(self.timeout)
                continue
            except httpx.HTTPError as exc:
                last_error = ProviderError(0, str(exc))
                continue
            if response.status_code >= 500:
                last_error = ProviderError(response.status_code, response.text)
                continue
            if response.status_code != 200:
                raise ProviderError(response.status_code, response.text)
            payload = response.json()
            choice = payload["choices"][0]
            usage = payload.get("usage", {})
            return CompletionResult(
                text=choice["message"]["content"],
                provider_model_id=payload.get("model", self.model_id),
                input_tokens=usage.get("prompt_tokens", 0),
                output_tokens=usage.get("completion_tokens", 0),
                truncated=choice.get("finish_reason") == "length",
            )
        assert last_error is not None
        raise last_error

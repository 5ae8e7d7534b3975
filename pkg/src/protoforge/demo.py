"""Canned walkthrough of the Chinese-learning usage scenario.

Provides a scripted provider whose completions carry the scenario's matrix
entries, requirement selection, spec, placeholder data, plan, and step code;
a runner that drives the whole pipeline with them; and a fixture writer that
records the run into a replay transcript. Tests and the workbench demo mode
both lean on this module for deterministic, network-free end-to-end runs.
"""

from __future__ import annotations

import json
import shutil
import sys
import tempfile
from pathlib import Path

from .codegen import CodeRules, approve_step, generate_plan, generate_step_code, iterate_step
from .gateway import (
    CompletionResult,
    Gateway,
    GatewayMode,
    ModelRole,
    PromptRequest,
    ReplayIndex,
)
from .ideation import brainstorm
from .matrix import CellKey, Dimension, Level, submit_cell, submit_problem
from .project import Project
from .scoping import generate_data, generate_spec, identify_requirements
from .store import ProjectStore

USAGE_PROJECT_NAME = "chinese-flashcards"
USAGE_PROBLEM = "learn Chinese"

PERSON_IDEA = CellKey(Dimension.PERSON, Level.IDEA)
PERSON_GROUNDING = CellKey(Dimension.PERSON, Level.GROUNDING)
APPROACH_IDEA = CellKey(Dimension.APPROACH, Level.IDEA)
APPROACH_GROUNDING = CellKey(Dimension.APPROACH, Level.GROUNDING)
INTERACTION_IDEA = CellKey(Dimension.INTERACTION, Level.IDEA)
INTERACTION_GROUNDING = CellKey(Dimension.INTERACTION, Level.GROUNDING)

PERSON_IDEAS = [
    "Non-native speakers interested in Chinese culture",
    "Visual learners struggling with language memorization",
    "Travel enthusiasts planning a trip to China",
]

PERSON_GROUNDING_TEXT = (
    "- Confusion arises due to unfamiliarity with Chinese characters and their complex "
    "structure, slowing the learning process.\n"
    "- Difficulty in linking characters to their corresponding meaning or "
    "pronunciation, hindering vocabulary acquisition.\n"
    "- Traditional memorization methods offer little aid to visual learners who could "
    "better recall information through imagery."
)

APPROACH_IDEAS = [
    "Pictorial spaced repetition learning",
    "Visual storytelling for language acquisition",
    "Cognitive load theory for efficient memorization",
]

APPROACH_GROUNDING_SRS = (
    "- Implement the spaced repetition system (SRS) algorithm to schedule review times "
    "according to each user's progress, allowing items to reappear before they're "
    "likely to be forgotten.\n"
    "- Incorporate visual images representing Chinese characters or words, enhancing "
    "the memory association between visual cues and corresponding meanings.\n"
    "- Integrate regular reviews into the learning process, which are fine-tuned "
    "according to the user's performance, to further solidify memory and retention.\n"
    "- Leverage cognitive science principles such as interleaving (mixing similar "
    "tasks) and retrieval practice (recalling an item from memory), to increase "
    "learning effectiveness."
)

APPROACH_GROUNDING_STORY = (
    "- Integrate visual aids, such as illustrations or animations, that correlate with "
    "each word's meaning to enhance understanding and recall.\n"
    "- Develop an algorithm that links related words and images together in a "
    "meaningful story, promoting stronger memory associations.\n"
    "- Make use of GPT to generate context-rich sentences or mini-stories, helping to "
    "create a narrative around each word or character.\n"
    "- Ensure design of the learning material caters to visual learners with a focus "
    "on vibrant, engaging, and contextually relevant graphical representations."
)

INTERACTION_IDEAS = [
    "Simple guess-and-review quiz interface",
    "Visual dictionary flashcard interface",
    "Image-based language learning game interface",
]

INTERACTION_GROUNDING_TEXT = (
    "- The quiz interface should present the Chinese character or word along with its "
    "corresponding image.\n"
    "- The user then attempts to guess its meaning. If they respond accurately, the "
    "item is pushed back into the review cycle based on the SRS algorithm.\n"
    "- If the guess is incorrect, the correct meaning is displayed, and the item is "
    "scheduled for another review sooner.\n"
    "- Users should have a clear view of their progress and a way to navigate to "
    "previously learned words for self-study."
)

REQUIREMENTS_COMPLETION = '["Dynamically generated AI-images", "Pre-generated data"]'

USAGE_SPEC_TEXT = """\
Application Layout:
- Divide the interface into three main sections: "Flashcards," "Quiz," and "Progress."
- The "Flashcards" section displays the Chinese character/word along with its corresponding image for visual association.
- The "Quiz" section presents the character/word and image, prompting the user to input the meaning.
- The "Progress" section shows the user's performance metrics, such as accuracy rate and words mastered.

User Interactions:
- In the "Flashcards" section, users can click through the flashcards to study the character/word and its associated image.
- In the "Quiz" section, users can type in their answer for the displayed character/word and image.
- Users can click a "Show Answer" button to reveal the correct meaning if they are unsure.
- Users can navigate between the "Flashcards," "Quiz," and "Progress" sections using tabs or buttons.

Inputs and Logic:
- The app will use a pre-generated dataset of Chinese characters/words, their meanings, and associated images.
- The spaced repetition system (SRS) algorithm will determine the optimal interval for reviewing each character/word based on the user's performance.
- Correctly answered items in the "Quiz" section will have their review interval increased (pushed further back in the review cycle).
- Incorrectly answered items will have their review interval decreased (scheduled for more frequent review).
- The app will track the user's progress, such as the number of words mastered and accuracy rates, and display this information in the "Progress" section.
- Incorporate cognitive science principles like interleaving (mixing different types of content) and retrieval practice (actively recalling information) into the "Quiz" section to enhance learning effectiveness.

By combining visual associations with images, spaced repetition, and interactive quizzes, this UI aims to provide an engaging and effective way for non-Chinese speaking students to learn and retain Chinese characters and vocabulary."""

USAGE_DATA_ITEMS = [
    {"id": 1, "chinese": "我学习中文", "meaning": "I study Chinese", "imagePath": "images/studying.jpg"},
    {"id": 2, "chinese": "你好吗?", "meaning": "How are you?", "imagePath": "images/greeting.jpg"},
    {"id": 3, "chinese": "这是一本书", "meaning": "This is a book", "imagePath": "images/book.jpg"},
    {"id": 4, "chinese": "我喜欢吃苹果", "meaning": "I like to eat apples", "imagePath": "images/apple.jpg"},
    {"id": 5, "chinese": "今天天气很好", "meaning": "The weather is nice today", "imagePath": "images/sunny.jpg"},
    {"id": 6, "chinese": "我们去公园吧", "meaning": "Let's go to the park", "imagePath": "images/park.jpg"},
    {"id": 7, "chinese": "这个房间很大", "meaning": "This room is big", "imagePath": "images/room.jpg"},
    {"id": 8, "chinese": "我喜欢听音乐", "meaning": "I like to listen to music", "imagePath": "images/music.jpg"},
    {"id": 9, "chinese": "我们去看电影吧", "meaning": "Let's go watch a movie", "imagePath": "images/movie.jpg"},
    {"id": 10, "chinese": "我想买一件新衣服", "meaning": "I want to buy a new piece of clothing", "imagePath": "images/shopping.jpg"},
    {"id": 11, "chinese": "我们去吃晚饭吧", "meaning": "Let's go eat dinner", "imagePath": "images/dinner.jpg"},
    {"id": 12, "chinese": "这个城市很繁华", "meaning": "This city is bustling", "imagePath": "images/city.jpg"},
    {"id": 13, "chinese": "我喜欢旅游", "meaning": "I like to travel", "imagePath": "images/travel.jpg"},
    {"id": 14, "chinese": "我们去运动吧", "meaning": "Let's go exercise", "imagePath": "images/exercise.jpg"},
    {"id": 15, "chinese": "这个项目很有趣", "meaning": "This project is interesting", "imagePath": "images/project.jpg"},
]

USAGE_PLAN_STEPS = [
    "Set up the React application and create the main layout with the three sections: "
    "'Flashcards', 'Quiz', and 'Progress'. Read in the pre-generated dataset of "
    "Chinese characters/words, their meanings, and associated images from the data "
    "endpoint.",
    "Implement the 'Flashcards' section with a display for the Chinese character/word "
    "and its corresponding image. Allow users to click through the flashcards.",
    "Implement the 'Quiz' section with a display for the Chinese character/word and "
    "its associated image. Allow users to input their answer and reveal the correct "
    "meaning. Integrate the spaced repetition system (SRS) algorithm to determine the "
    "optimal review interval for each character/word based on the user's performance.",
    "Implement the 'Progress' section to display the user's performance metrics, such "
    "as accuracy rate and words mastered. Incorporate cognitive science principles "
    "like interleaving and retrieval practice into the 'Quiz' section.",
    "Call GPT to generate images for the Chinese characters/words and associate them "
    "with the corresponding entries in the dataset. Display these images in the "
    "'Flashcards' and 'Quiz' sections.",
]

ITERATE_PROBLEM_TEXT = (
    "After I click submit, it moves on to the next question but also shows the answer "
    "of the next question."
)

USAGE_DATA_ENDPOINT = f"/projects/{USAGE_PROJECT_NAME}/data"


# --- canned prototype documents ------------------------------------------------

_HEAD = """\
<!DOCTYPE html>
<html lang="en">
<head>
  <meta charset="UTF-8">
  <meta name="viewport" content="width=device-width, initial-scale=1.0">
  <title>Pictorial Chinese Trainer</title>
  <script src="https://unpkg.com/react@18/umd/react.development.js" crossorigin></script>
  <script src="https://unpkg.com/react-dom@18/umd/react-dom.development.js" crossorigin></script>
  <script src="https://unpkg.com/@babel/standalone/babel.min.js"></script>
  <link rel="stylesheet" href="https://fonts.googleapis.com/css?family=Roboto:300,400,500,700&display=swap" />
  <script src="https://unpkg.com/@mui/material@5.0.0-rc.1/umd/material-ui.development.js" crossorigin></script>
</head>
<body>
  <div id="root"></div>
  <script type="text/babel">
    const { Button, Container, Typography, TextField, Tabs, Tab, Box, Card } = MaterialUI;
    const { useState, useEffect } = React;
"""

_TAIL = """\
    const rootElement = document.getElementById('root');
    const root = ReactDOM.createRoot(rootElement);
    root.render(<App />);
  </script>
</body>
</html>"""


def _flashcards_block(enabled: bool) -> str:
    if not enabled:
        return "      const flashcardsView = <Typography>Flashcards coming soon.</Typography>;\n"
    return """\
      const [cardIndex, setCardIndex] = useState(0);
      const card = items[cardIndex] || null;
      const flashcardsView = card ? (
        <Card style={{ padding: 16 }}>
          <Typography variant="h4">{card.chinese}</Typography>
          <Typography variant="h6">{card.meaning}</Typography>
          {card.generatedImageUrl && <img src={card.generatedImageUrl} alt={card.meaning} width="160" />}
          <Button onClick={() => setCardIndex((cardIndex + items.length - 1) % items.length)}>Prev</Button>
          <Button onClick={() => setCardIndex((cardIndex + 1) % items.length)}>Next</Button>
        </Card>
      ) : <Typography>Loading cards...</Typography>;
"""


def _quiz_block(stage: int) -> str:
    # stage 0: placeholder; 1: buggy reveal; 2: fixed reveal.
    if stage == 0:
        return "      const quizView = <Typography>Quiz coming soon.</Typography>;\n"
    reveal = (
        "        setRevealed(true);\n" if stage == 1 else "        setRevealed(false);\n"
    )
    marker = "" if stage < 2 else "      // scenario-step-3-fixed\n"
    return (
        marker
        + """\
      const [quizIndex, setQuizIndex] = useState(0);
      const [answer, setAnswer] = useState('');
      const [revealed, setRevealed] = useState(false);
      const [results, setResults] = useState([]);
      const quizItem = items[quizIndex] || null;
      const submitAnswer = () => {
        if (!quizItem) { return; }
        const correct = answer.trim().toLowerCase() === quizItem.meaning.toLowerCase();
        setResults(results.concat([{ id: quizItem.id, correct: correct }]));
        setQuizIndex((quizIndex + 1) % items.length);
        setAnswer('');
"""
        + reveal
        + """\
      };
      const quizView = quizItem ? (
        <Box>
          <Typography variant="h4">{quizItem.chinese}</Typography>
          {quizItem.generatedImageUrl && <img src={quizItem.generatedImageUrl} alt="hint" width="120" />}
          <TextField label="Meaning" value={answer} onChange={(e) => setAnswer(e.target.value)} />
          <Button variant="contained" onClick={submitAnswer}>Submit</Button>
          <Button onClick={() => setRevealed(true)}>Show Answer</Button>
          {revealed && <Typography>Answer: {quizItem.meaning}</Typography>}
        </Box>
      ) : <Typography>Loading quiz...</Typography>;
"""
    )


def _progress_block(enabled: bool) -> str:
    if not enabled:
        return "      const progressView = <Typography>Progress coming soon.</Typography>;\n"
    return """\
      const attempts = results.length;
      const correctCount = results.filter((r) => r.correct).length;
      const accuracy = attempts ? Math.round((correctCount / attempts) * 100) : 0;
      const progressView = (
        <Box>
          <Typography variant="h5">Accuracy rate: {accuracy}%</Typography>
          <Typography variant="h6">Words mastered: {correctCount}</Typography>
        </Box>
      );
"""


def _image_block(enabled: bool, proxy_mode: bool) -> str:
    if not enabled:
        return ""
    if proxy_mode:
        url = "/proxy/images"
        headers = "{ 'Content-Type': 'application/json' }"
    else:
        url = "https://api.openai.com/v1/images/generations"
        headers = (
            "{ 'Content-Type': 'application/json', "
            "'Authorization': 'Bearer {openai_api_key}' }"
        )
    return f"""\
      const illustrate = async (item) => {{
        try {{
          const response = await fetch('{url}', {{
            method: 'POST',
            headers: {headers},
            body: JSON.stringify({{ prompt: 'An illustration of: ' + item.meaning, n: 1, size: '256x256' }})
          }});
          const result = await response.json();
          const updated = items.map((it) => it.id === item.id ? {{ ...it, generatedImageUrl: result.data[0].url }} : it);
          setItems(updated);
        }} catch (err) {{
          console.error(err);
        }}
      }};
      useEffect(() => {{ if (items.length) {{ illustrate(items[0]); }} }}, [items.length]);
"""


def build_usage_step_html(step: int, *, proxy_mode: bool = True, fixed_quiz: bool = False) -> str:
    """Assemble the cumulative prototype document for one scenario step."""
    markers = "".join(
        f"    <!-- scenario-step-{k} -->\n" for k in range(1, step + 1)
    )
    if fixed_quiz:
        markers += "    <!-- scenario-step-3-iterated -->\n"
    quiz_stage = 0 if step < 3 else (2 if fixed_quiz or step > 3 else 1)
    body = (
        _HEAD
        + markers
        + """\
    function App() {
      const [tab, setTab] = useState(0);
      const [items, setItems] = useState([]);
      useEffect(() => {
        fetch('%DATA_ENDPOINT%')
          .then((response) => response.json())
          .then(setItems)
          .catch((err) => console.error(err));
      }, []);
"""
        + _image_block(step >= 5, proxy_mode)
        + _flashcards_block(step >= 2)
        + _quiz_block(quiz_stage)
        + _progress_block(step >= 4)
        + """\
      return (
        <Container>
          <Typography variant="h3">Pictorial Chinese Trainer</Typography>
          <Tabs value={tab} onChange={(e, v) => setTab(v)}>
            <Tab label="Flashcards" />
            <Tab label="Quiz" />
            <Tab label="Progress" />
          </Tabs>
          <Box hidden={tab !== 0}>{flashcardsView}</Box>
          <Box hidden={tab !== 1}>{quizView}</Box>
          <Box hidden={tab !== 2}>{progressView}</Box>
        </Container>
      );
    }
"""
        + _TAIL
    )
    return body.replace("%DATA_ENDPOINT%", USAGE_DATA_ENDPOINT)


# --- scripted provider -------------------------------------------------------------


def _as_json_array(texts: list[str]) -> str:
    return json.dumps(texts, ensure_ascii=False)


class ScriptedUsageProvider:
    """Provider that answers with the scenario's canned completions.

    Requests are routed on distinctive prompt text, so the provider works
    identically no matter the order the pipeline makes its calls in.
    """

    def __init__(self, *, proxy_mode: bool = True):
        self.proxy_mode = proxy_mode

    def _respond(self, request: PromptRequest) -> str:
        system = request.rendered_system
        user = request.rendered_user

        if "ONLY FIX THE BUG" in system:
            return (
                "I found the bug and fixed it. Here is the full corrected file:\n"
                "```html\n"
                + build_usage_step_html(3, proxy_mode=self.proxy_mode, fixed_quiz=True)
                + "\n```"
            )
        if "DO NOT DELETE PREVIOUS CODE" in system:
            for step_number, description in enumerate(USAGE_PLAN_STEPS, start=1):
                if f"The current task: {description}" in user:
                    return (
                        "Sure! Here is the complete document:\n```html\n"
                        + build_usage_step_html(step_number, proxy_mode=self.proxy_mode)
                        + "\n```\nLet me know if you need anything else."
                    )
            raise AssertionError("scripted provider got an unexpected codegen task")
        if "You are generating fake JSON data" in system:
            return (
                "```json\n"
                + json.dumps(USAGE_DATA_ITEMS, ensure_ascii=False, indent=2)
                + "\n```"
            )
        if "implementation plan" in system:
            lines = [f"{i}. {text}" for i, text in enumerate(USAGE_PLAN_STEPS, start=1)]
            return "\n".join(lines)
        if "project specification" in system:
            return USAGE_SPEC_TEXT
        if "capability labels" in system:
            return REQUIREMENTS_COMPLETION

        # Matrix ideation calls: route on the dimension/level request line.
        if "person idea entry" in user:
            return _as_json_array(PERSON_IDEAS)
        if "person grounding entry" in user:
            return _as_json_array(
                [
                    PERSON_GROUNDING_TEXT,
                    "- Learners feel overwhelmed by character complexity.\n"
                    "- Pictures anchor new vocabulary to familiar scenes.\n"
                    "- Progress feedback sustains motivation.",
                    "- Plain word lists are quickly forgotten.\n"
                    "- Visual context builds durable associations.\n"
                    "- Self-testing surfaces weak spots early.",
                ]
            )
        if "approach idea entry" in user:
            return _as_json_array(APPROACH_IDEAS)
        if "approach grounding entry" in user:
            if "Visual storytelling for language acquisition" in user:
                primary = APPROACH_GROUNDING_STORY
            else:
                primary = APPROACH_GROUNDING_SRS
            return _as_json_array(
                [
                    primary,
                    "- Pair each new word with a short illustrated caption.\n"
                    "- Review items in small daily batches.\n"
                    "- Track recall strength per item.",
                    "- Group related phrases into themed lessons.\n"
                    "- Reward streaks to build habit.\n"
                    "- Offer hints before revealing answers.",
                ]
            )
        if "interaction idea entry" in user:
            return _as_json_array(INTERACTION_IDEAS)
        if "interaction grounding entry" in user:
            return _as_json_array(
                [
                    INTERACTION_GROUNDING_TEXT,
                    "- Show one question at a time with a large prompt.\n"
                    "- Offer multiple-choice fallback after two misses.\n"
                    "- Summarize session results at the end.",
                    "- Keep controls to a single input and button.\n"
                    "- Animate transitions between questions.\n"
                    "- Expose a review list of missed items.",
                ]
            )
        raise AssertionError(
            f"scripted provider has no answer for this prompt:\n{user[:200]}"
        )

    def complete(self, request: PromptRequest) -> CompletionResult:
        text = self._respond(request)
        return CompletionResult(
            text=text,
            provider_model_id="scripted-usage",
            input_tokens=len(request.rendered_user) // 4,
            output_tokens=len(text) // 4,
            truncated=False,
        )


def scripted_providers(*, proxy_mode: bool = True) -> dict[ModelRole, ScriptedUsageProvider]:
    provider = ScriptedUsageProvider(proxy_mode=proxy_mode)
    return {ModelRole.IDEATION: provider, ModelRole.CODEGEN: provider}


# --- scenario runner -----------------------------------------------------------------


def run_usage_scenario(
    store: ProjectStore,
    gateway: Gateway,
    *,
    proxy_mode: bool = True,
    rules: CodeRules | None = None,
    project_name: str = USAGE_PROJECT_NAME,
) -> Project:
    """Drive the full pipeline for the Chinese-learning walkthrough.

    Matrix exploration (including one idea swap that stales and then replaces
    a grounding), requirement identification, spec, data, plan, five code
    steps, and one debug iteration on the quiz step.
    """
    project = store.create_project(project_name)
    project.matrix = submit_problem(USAGE_PROBLEM)

    brainstorm(project, gateway, PERSON_IDEA)
    submit_cell(project.matrix, PERSON_IDEA, PERSON_IDEAS[1])
    brainstorm(project, gateway, PERSON_GROUNDING)
    submit_cell(project.matrix, PERSON_GROUNDING, PERSON_GROUNDING_TEXT)

    # Explore storytelling first, keep its grounding as a saved version, then
    # settle on spaced repetition (which stales and replaces the grounding).
    brainstorm(project, gateway, APPROACH_IDEA)
    submit_cell(project.matrix, APPROACH_IDEA, APPROACH_IDEAS[1])
    brainstorm(project, gateway, APPROACH_GROUNDING)
    submit_cell(project.matrix, APPROACH_GROUNDING, APPROACH_GROUNDING_STORY)
    from .matrix import save_cell_version

    save_cell_version(project.matrix, APPROACH_GROUNDING)
    submit_cell(project.matrix, APPROACH_IDEA, APPROACH_IDEAS[0])
    brainstorm(project, gateway, APPROACH_GROUNDING)
    submit_cell(project.matrix, APPROACH_GROUNDING, APPROACH_GROUNDING_SRS)

    brainstorm(project, gateway, INTERACTION_IDEA)
    submit_cell(project.matrix, INTERACTION_IDEA, INTERACTION_IDEAS[0])
    brainstorm(project, gateway, INTERACTION_GROUNDING)
    submit_cell(project.matrix, INTERACTION_GROUNDING, INTERACTION_GROUNDING_TEXT)
    store.save(project)

    identify_requirements(project, gateway)
    generate_spec(project, gateway)
    generate_data(project, gateway)
    generate_plan(project, gateway)
    store.save(project)

    for step_number in range(1, 6):
        generate_step_code(
            project, gateway, step_number, rules=rules, proxy_mode=proxy_mode
        )
        if step_number == 3:
            iterate_step(project, gateway, 3, ITERATE_PROBLEM_TEXT, rules=rules)
        approve_step(project, step_number)
        store.save(project)

    return project


def write_usage_fixtures(fixtures_dir: Path, *, proxy_mode: bool = True) -> Path:
    """Record the scenario against the scripted provider into a fixture file."""
    fixtures_dir = Path(fixtures_dir)
    fixtures_dir.mkdir(parents=True, exist_ok=True)
    target = fixtures_dir / "usage.ndjson"
    with tempfile.TemporaryDirectory() as scratch:
        store = ProjectStore(Path(scratch))
        gateway = Gateway(
            GatewayMode.RECORD, scripted_providers(proxy_mode=proxy_mode)
        )
        project = run_usage_scenario(store, gateway, proxy_mode=proxy_mode)
        shutil.copyfile(store.transcript_path(project.id), target)
    return target


def replay_gateway(fixtures_path: Path) -> Gateway:
    return Gateway(GatewayMode.REPLAY, replay_index=ReplayIndex.load(Path(fixtures_path)))


def main(argv: list[str] | None = None) -> int:
    args = argv if argv is not None else sys.argv[1:]
    if len(args) != 1:
        print("usage: python -m protoforge.demo FIXTURES_DIR", file=sys.stderr)
        return 2
    target = write_usage_fixtures(Path(args[0]))
    print(f"wrote usage-scenario fixtures to {target}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

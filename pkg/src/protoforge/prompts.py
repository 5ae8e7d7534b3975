"""Prompt templates and few-shot blocks for every pipeline stage.

The few-shot material (three dating applications for matrix ideation, three
sample project specifications, the sample stepwise plan, the placeholder-data
example, and the self-invocation snippets) is the substance that steers each
model call; templates here only wrap it with bindings. Placeholder-shaped
text inside few-shot code (for example {openai_api_key}) is intentionally
left unbound so it survives into prompts, generated code, and artifacts at
rest; credentials are substituted at serve time only.
"""

from __future__ import annotations

from .gateway import ModelRole, PromptTemplate
from .matrix import CellKey, Dimension, Level

UPSTREAM_COMPLETIONS_URL = "https://api.openai.com/v1/chat/completions"
UPSTREAM_IMAGES_URL = "https://api.openai.com/v1/images/generations"
PROXY_COMPLETIONS_PATH = "/proxy/completions"
PROXY_IMAGES_PATH = "/proxy/images"
API_KEY_PLACEHOLDER = "{openai_api_key}"

DIMENSION_BLURBS = {
    Dimension.PERSON: "who the application is for",
    Dimension.APPROACH: "the method, theory, or strategy behind the solution",
    Dimension.INTERACTION: "the interaction paradigm the user interface is built around",
}

# --- design-matrix few-shots -------------------------------------------------
# Three applications spanning one problem space (dating), each broken down by
# dimension and level to establish the expected level of detail per entry.

MATRIX_FEW_SHOTS: dict[str, dict[tuple[Dimension, Level], str]] = {
    "OKCupid": {
        (Dimension.PERSON, Level.IDEA): "Single person",
        (Dimension.PERSON, Level.GROUNDING): (
            "- Difficulty in finding potential partners who meet specific criteria like "
            "race, religion, age, or occupation.\n"
            "- Challenges in efficiently filtering through dating apps to locate "
            "compatible matches.\n"
            "- Need for an application that streamlines the process by allowing users to "
            "set precise criteria and receive curated suggestions."
        ),
        (Dimension.APPROACH, Level.IDEA): (
            "Searchable Database to allow people to search for people based on "
            "specified criteria"
        ),
        (Dimension.APPROACH, Level.GROUNDING): (
            "- Ensure the database includes comprehensive filters such as age, gender, "
            "sex, religion, and occupation to meet users' specific search criteria.\n"
            "- Develop a robust and scalable search algorithm that efficiently handles "
            "large datasets and returns accurate results based on the selected filters.\n"
            "- Implement user-friendly search and filtering interfaces that make it easy "
            "for users to apply multiple criteria and refine their search results."
        ),
        (Dimension.INTERACTION, Level.IDEA): "Faceted Browsing",
        (Dimension.INTERACTION, Level.GROUNDING): (
            "- Provide users with multiple facet filters, including age, gender, "
            "religion, occupation, and location, to refine their search effectively.\n"
            "- Ensure the UI dynamically updates search results in real-time as users "
            "adjust their facet filters, offering immediate feedback.\n"
            "- Design intuitive navigation with clear options to reset filters, switch "
            "criteria, and save searches, using checkboxes, sliders, and dropdowns for "
            "ease of use."
        ),
    },
    "Tinder": {
        (Dimension.PERSON, Level.IDEA): "Single person",
        (Dimension.PERSON, Level.GROUNDING): (
            "- Users often struggle to find matches that meet their physical preferences "
            "quickly and efficiently.\n"
            "- The abundance of profiles makes it challenging to identify those that "
            "align with specific looks or appearances.\n"
            "- A streamlined approach to swiping and filtering by appearance would help "
            "users connect with potential matches faster, focusing on visual attraction."
        ),
        (Dimension.APPROACH, Level.IDEA): (
            "Lower the cognitive load by providing less information, making it easier to "
            "judge potential matches quickly"
        ),
        (Dimension.APPROACH, Level.GROUNDING): (
            "- Limit the displayed information to essential details, such as a single "
            "profile photo and a brief tagline, to encourage snap judgments.\n"
            "- Focus on visual appeal as the primary matching criterion, reducing the "
            "need for users to sift through extensive profiles.\n"
            "- Use an algorithm to prioritize matches based on visual preferences and "
            "minimal data inputs, streamlining the matching process."
        ),
        (Dimension.INTERACTION, Level.IDEA): "Card Swipe",
        (Dimension.INTERACTION, Level.GROUNDING): (
            "- Each card should prominently feature a large profile photo, as visual "
            "appeal is the primary factor in this interaction.\n"
            "- Include minimal text, such as the person's name, age, and a short tagline "
            "or fun fact, to provide just enough context without overwhelming the user.\n"
            '- Add simple icons or buttons for actions like "Like" or "Pass," ensuring '
            "that users can quickly swipe or tap to make their choice."
        ),
    },
    "Coffee Meets Bagel": {
        (Dimension.PERSON, Level.IDEA): "Single person",
        (Dimension.PERSON, Level.GROUNDING): (
            "- Users who are looking for serious relationships prefer fewer, "
            "high-quality matches over endless swiping.\n"
            "- The overwhelming number of potential matches on other apps can make it "
            "difficult to focus on finding a meaningful connection.\n"
            "- An app designed for serious dating should streamline the process by "
            "offering a curated selection of potential partners, reducing time spent on "
            "the app."
        ),
        (Dimension.APPROACH, Level.IDEA): (
            "Lower the cognitive load by having less matches to make more intentional "
            "judgements"
        ),
        (Dimension.APPROACH, Level.GROUNDING): (
            "- Present a select number of potential matches each day to prevent decision "
            "fatigue and promote thoughtful consideration.\n"
            "- Display key information like shared interests, compatibility indicators, "
            "and mutual friends to aid decision-making without overwhelming the user.\n"
            "- Prioritize quality over quantity, ensuring that each match is relevant to "
            "the user's preferences and relationship goals."
        ),
        (Dimension.INTERACTION, Level.IDEA): "Feed with 5 options to date",
        (Dimension.INTERACTION, Level.GROUNDING): (
            "- The daily message should include a concise profile summary for each of "
            "the five matches, highlighting essential details such as name, age, "
            "occupation, and a short personal note or shared interest.\n"
            "- Include compatibility scores or commonalities (e.g., mutual friends, "
            "hobbies) to help users quickly assess each match's potential.\n"
            "- Provide clear action buttons within the message to either like, pass, or "
            "start a conversation, making it easy for users to engage with their daily "
            "options."
        ),
    },
}


def matrix_few_shot_block(target: CellKey) -> str:
    """The three example applications sliced to the target's dimension and level."""
    lines = []
    for app_name, entries in MATRIX_FEW_SHOTS.items():
        text = entries[(target.dimension, target.level)]
        lines.append(f"{app_name} ({target.dimension.value} {target.level.value}):\n{text}")
    return "\n\n".join(lines)


IDEA_OUTPUT_RULES = (
    "Return a JSON array of exactly {count} strings. Each string is one idea: a short "
    "phrase that conveys the main concept for this dimension. Please only return the "
    "JSON array and nothing else."
)

GROUNDING_OUTPUT_RULES = (
    "Return a JSON array of exactly {count} strings. Each string is one grounding "
    "variant: 3-5 bullet points separated by newlines, each starting with '- ', giving "
    "concrete details for how the submitted idea is realized. Please only return the "
    "JSON array and nothing else."
)


def output_rules_for(target: CellKey, count: int) -> str:
    rules = IDEA_OUTPUT_RULES if target.level is Level.IDEA else GROUNDING_OUTPUT_RULES
    return rules.replace("{count}", str(count))


IDEATION_SYSTEM = """\
You are helping design a UI prototype by exploring the problem space along three \
dimensions: Person (who the application is for), Approach (the method, theory, or \
strategy behind the solution), and Interaction (the interaction paradigm the user \
interface is built around). Each dimension is explored at two levels of specificity: \
Idea, a short phrase conveying the main concept, and Grounding, 3-5 bullet points \
giving concrete details for how the idea is realized.

Here are worked examples from three applications in one problem space, sliced to the \
entry you are filling in:

{few_shots}

You are brainstorming the {dimension} dimension ({dimension_blurb}) at the {level} \
level. {output_rules}"""

BRAINSTORM_TEMPLATE = PromptTemplate(
    name="matrix_brainstorm",
    role=ModelRole.IDEATION,
    system_text=IDEATION_SYSTEM,
    user_text=(
        "Problem: {problem}\n\n"
        "Already-submitted design entries, in the order they were decided:\n{context}\n\n"
        "Brainstorm {count} options for the {dimension} {level} entry."
    ),
    placeholders=frozenset(
        {
            "few_shots",
            "dimension",
            "dimension_blurb",
            "level",
            "output_rules",
            "problem",
            "context",
            "count",
        }
    ),
)

ITERATE_TEMPLATE = PromptTemplate(
    name="matrix_iterate",
    role=ModelRole.IDEATION,
    system_text=IDEATION_SYSTEM,
    user_text=(
        "Problem: {problem}\n\n"
        "Already-submitted design entries, in the order they were decided:\n{context}\n\n"
        "Candidates proposed so far for the {dimension} {level} entry:\n{candidates}\n\n"
        "The user wants different options, with this feedback: {feedback}\n"
        "Brainstorm {count} new options that take the feedback into account."
    ),
    placeholders=frozenset(
        {
            "few_shots",
            "dimension",
            "dimension_blurb",
            "level",
            "output_rules",
            "problem",
            "context",
            "candidates",
            "feedback",
            "count",
        }
    ),
)


def format_context(entries: list[tuple[CellKey, str]]) -> str:
    if not entries:
        return "(none yet)"
    return "\n".join(f"{key}: {text}" for key, text in entries)


# --- requirement identification ----------------------------------------------

REQUIREMENTS_TEMPLATE = PromptTemplate(
    name="identify_requirements",
    role=ModelRole.IDEATION,
    system_text=(
        "You scope the technical requirements for a single-file HTML UI prototype. "
        "Based on the design summary, choose which of these capabilities the prototype "
        "needs:\n{vocabulary}\n\n"
        "Respond with a JSON array of the selected capability labels and nothing else. "
        "An empty array is a valid answer when none apply."
    ),
    user_text="Problem: {problem}\n\nDesign matrix:\n{matrix}",
    placeholders=frozenset({"vocabulary", "problem", "matrix"}),
)


# --- project specification ----------------------------------------------------

SPEC_FEW_SHOTS = """\
Music Recommendation App
Application Layout:
- Create a clean, simple interface divided into two main sections: "Discover" and "Favorites."
- The "Discover" section would have a large area that changes dynamically to display song details with each swipe (song name, artist, album, genre, and description).
- It would also have 'like', 'dislike' and 'skip' buttons, which will work with simple clicks.
- The 'Favorites' section would be a list of all liked songs.
User Interactions:
- The user can click to swipe a song left (dislike), right (like), or down (skip).
- The user can click on a song to save to favorites once liked.
- The user can navigate between "Discover" and "Favorites" sections via top navigation tabs.
Inputs and Logic:
- The app will use the user's interactions (likes, dislikes, skips) as inputs to an ML model (implemented using GPT) to evolve its music recommendations in real-time.
- On initial use, ask the user for favorite genres, artists, or songs to kickstart the ML algorithm.
- The user's interaction with each song (whether they like, dislike, or skip it) will further tailor the recommendations.
- The saved favorite songs will be stored
- There is no need to create placeholder data for music, as GPT will return the music recommendations.

Outfit Generator App
Application Layout:
- Create a clean, minimalist interface with a prominent central area for displaying outfit recommendations.
- Divide the interface into three main sections: "Outfit Recommendations," "Wardrobe," and "Saved Outfits."
- The "Outfit Recommendations" section should display swipeable cards with visual representations of the recommended outfits, along with relevant tags (season, occasion, style).
- The "Wardrobe" section should allow users to input their clothing items, categorized by type (tops, bottoms, dresses, etc.).
- The "Saved Outfits" section should display a grid of liked outfits for future reference.
User Interactions:
- Users can swipe left by clicking no, or right by clicking yes on the outfit recommendation cards to dislike or like the outfit, respectively.
- Users can click on individual clothing items in the "Wardrobe" section to add or remove them from their virtual wardrobe.
- Users can click on a liked outfit in the "Saved Outfits" section to view its details or remove it from the saved list.
Inputs and Logic:
- The app will use the user's initial wardrobe inputs and style preferences (gathered through a brief questionnaire) to kickstart the GPT-powered outfit recommendation algorithm.
- The algorithm will consider factors like season, occasion, and the user's wardrobe items to generate outfit recommendations.
- The user's interactions (likes, dislikes) with the recommended outfits will be used as feedback to refine and personalize the algorithm's recommendations over time.
- The liked outfits will be saved in the "Saved Outfits" section for future reference.
- Create placeholder data for the initial wardrobe.

Plant Watering Tracker
Application Layout:
- Create a clean and intuitive interface with a prominent section for the "Watering Calendar."
- Divide the interface into three main sections: "Watering Calendar," "Plant List," and "Watering Reminders."
- The "Watering Calendar" section should display a monthly calendar view with visual indicators for scheduled watering days.
- The "Plant List" section should allow users to add and manage their plant collection, including details like species, pot size, and watering requirements.
- The "Watering Reminders" section should display upcoming watering tasks and allow users to set notification preferences.
User Interactions:
- Users can click on specific dates in the "Watering Calendar" to schedule or modify watering tasks for individual plants or groups.
- Users can click on plants in the "Plant List" to view or edit their details, including watering schedules.
- Users can set notification preferences (email, push notifications, etc.) for upcoming watering tasks in the "Watering Reminders" section.
Inputs and Logic:
- The app will use the user's initial plant inputs (species, pot size, etc.) to determine baseline watering requirements for each plant.
- An algorithm (implemented using GPT) will analyze factors like plant type, pot size, and environmental conditions (temperature, humidity, etc.) to generate adaptive watering schedules.
- The algorithm will learn from the user's interactions (manually adjusting watering schedules, plant health feedback) to refine its recommendations over time.
- The app will send reminders based on the user's scheduled watering tasks and notification preferences.
- Create placeholder data for the user's current plants."""

SPEC_TEMPLATE = PromptTemplate(
    name="generate_spec",
    role=ModelRole.CODEGEN,
    system_text=(
        "You write the project specification for a single-file HTML UI prototype. The "
        "spec is a detailed bullet-point document, typically about one page long, with "
        'exactly three sections in this order, each introduced by its header line: '
        '"Application Layout:", "User Interactions:", and "Inputs and Logic:". It '
        "details what content lives in the interface, how the application responds to "
        "the user, and when and how the application calls models or external "
        "libraries.\n\nHere are example specs:\n\n{few_shots}\n\n"
        "If pre-generated data is among the requirements, the spec must direct its "
        'creation (for example "Create placeholder data for ..." or a description of '
        "the pre-generated dataset). Return only the spec document."
    ),
    user_text=(
        "Problem: {problem}\n\nDesign matrix:\n{matrix}\n\n"
        "Selected technical requirements: {requirements}\n\n"
        "Write the project specification."
    ),
    placeholders=frozenset({"few_shots", "problem", "matrix", "requirements"}),
)


# --- placeholder data ----------------------------------------------------------

DATA_SYSTEM = """\
You are generating fake JSON data for a UI that a user wants to create. The spec \
should give instructions as to what data needs to be generated.

For example, for a spec describing an outfit generator whose logic ends with "Create \
placeholder data for the initial wardrobe", we only want to generate fake data for the \
INITIAL wardrobe, not the outfit recommendations.

Please generate a JSON array of fake data with appropriate fields. Here is an example:

Input: I want to create a UI that visualizes a beauty store's inventory... It should \
have the fields `title`, `description`, `price`, `discountPercentage`, `rating`, \
`stock`, `brand`, `category`

System result:
[
    {
        "id": 11,
        "title": "perfume Oil",
        "description": "Mega Discount",
        "price": 13,
        "discountPercentage": 8.4,
        "rating": 4.26,
        "stock": 65,
        "brand": "Impression of Acqua Di Gio",
        "category": "fragrances"
    },
    {
        "id": 12,
        "title": "perfume Oil",
        "description": "Half Off",
        "price": 15,
        "discountPercentage": 12.3,
        "rating": 3.46,
        "stock": 2343,
        "brand": "Victoria Secret",
        "category": "fragrances"
    }
]

Please follow these rules while creating the JSON array
1. Please only return the JSON array and nothing else.
2. Array length should be length 10-20.
3. Please ensure that the generated data makes sense."""

DATA_TEMPLATE = PromptTemplate(
    name="generate_data",
    role=ModelRole.CODEGEN,
    system_text=DATA_SYSTEM,
    user_text=(
        'Here is the spec:\n"{spec}"\n\n'
        "Also, consider the user in this situation, and generate data tailored to the "
        "user if necessary. The application is for {person_idea}, with these details: "
        "{person_grounding}"
    ),
    placeholders=frozenset({"spec", "person_idea", "person_grounding"}),
)


# --- stepwise plan --------------------------------------------------------------

PLAN_FEW_SHOT = """\
Spec:
Application Layout:
- Create a clean, minimalist interface with a prominent central area for displaying outfit recommendations.
- Divide the interface into three main sections: "Outfit Recommendations," "Wardrobe," and "Saved Outfits."
- The "Outfit Recommendations" section should display swipeable cards with visual representations of the recommended outfits, along with relevant tags (season, occasion, style).
- The "Wardrobe" section should allow users to input their clothing items, categorized by type (tops, bottoms, dresses, etc.).
- The "Saved Outfits" section should display a grid of liked outfits for future reference.
User Interactions:
- Users can swipe left by clicking no, or right by clicking yes on the outfit recommendation cards to dislike or like the outfit, respectively.
- Users can click on individual clothing items in the "Wardrobe" section to add or remove them from their virtual wardrobe.
- Users can click on a liked outfit in the "Saved Outfits" section to view its details or remove it from the saved list.
Inputs and Logic:
- The app will use the user's initial wardrobe inputs and style preferences (gathered through a brief questionnaire) to kickstart the GPT-powered outfit recommendation algorithm.
- The algorithm will consider factors like season, occasion, and the user's wardrobe items to generate outfit recommendations.
- The user's interactions (likes, dislikes) with the recommended outfits will be used as feedback to refine and personalize the algorithm's recommendations over time.
- The liked outfits will be saved in the "Saved Outfits" section for future reference.
- Create placeholder data for the initial wardrobe.

Plan:
1. Set up the React application and create the main layout with the three sections: 'Outfit Recommendations', 'Wardrobe', and 'Saved Outfits'. Read in the placeholder data from the endpoint.
2. Implement the 'Outfit Recommendations' section with swipeable cards using MUI components. Create placeholder data for initial outfit recommendations.
3. Implement the 'Wardrobe' section with a list of clothing items categorized by type (tops, bottoms, dresses, etc.). Allow users to add or remove items from their virtual wardrobe.
4. Implement the 'Saved Outfits' section with a grid layout to display liked outfits. Allow users to view outfit details or remove outfits from the saved list.
5. Integrate GPT to generate outfit recommendations based on the user's wardrobe and style preferences. Implement the logic to handle user interactions (likes, dislikes) and refine the recommendations accordingly."""

PLAN_TEMPLATE = PromptTemplate(
    name="generate_plan",
    role=ModelRole.CODEGEN,
    system_text=(
        "You break a UI prototype specification into an implementation plan of "
        "approximately 3-6 steps, depending on the complexity of the application. Each "
        "step is modular, distinct, and nonoverlapping: the next-smallest testable unit "
        "building on the previous step, the way a developer incrementally adds "
        "features. The first step establishes the basic HTML structure; later steps add "
        "functionality in a logical order without reworking earlier code.\n\n"
        "Here is an example:\n\n{few_shot}\n\n"
        "Return the plan as numbered lines ('1. ...'), one step per line, and nothing "
        "else."
    ),
    user_text="Spec:\n{spec}\n\nNotes:\n{requirement_notes}\n\nWrite the plan.",
    placeholders=frozenset({"few_shot", "spec", "requirement_notes"}),
)


# --- code generation -------------------------------------------------------------

# Reference single-file document every generation is anchored on: React, ReactDOM,
# Babel, and MUI loaded from the CDN, one root mount, everything in one page.
MUI_SKELETON_HTML = """\
<!DOCTYPE html>
<html lang="en">
<head>
  <meta charset="UTF-8">
  <meta name="viewport" content="width=device-width, initial-scale=1.0">
  <title>React App with MUI and Hooks</title>
  <!-- Load React and ReactDOM from CDN -->
  <script src="https://unpkg.com/react@18/umd/react.development.js" crossorigin></script>
  <script src="https://unpkg.com/react-dom@18/umd/react-dom.development.js" crossorigin></script>
  <!-- Babel for JSX transformation -->
  <script src="https://unpkg.com/@babel/standalone/babel.min.js"></script>
  <!-- Load MUI from CDN -->
  <link rel="stylesheet" href="https://fonts.googleapis.com/css?family=Roboto:300,400,500,700&display=swap" />
  <script src="https://unpkg.com/@mui/material@5.0.0-rc.1/umd/material-ui.development.js" crossorigin></script>
</head>
<body>
  <div id="root"></div>
  <script type="text/babel">
    const {
      Button,
      Container,
      Typography,
      TextField,
    } = MaterialUI;

    const { useState, useEffect } = React;

    function App() {
      const [count, setCount] = useState(0);
      const [name, setName] = useState('');

      useEffect(() => {
        document.title = `Count: ${count}`;
      }, [count]);

      return (
        <Container>
          <Typography variant="h2" component="h1" gutterBottom>
            Hello, React with Material-UI and Hooks!
          </Typography>
          <Typography variant="h5">
            Count: {count}
          </Typography>
          <Button variant="contained" color="primary" onClick={() => setCount(count + 1)}>
            Increment
          </Button>
          <TextField
            label="Name"
            value={name}
            onChange={(e) => setName(e.target.value)}
            variant="outlined"
            margin="normal"
            fullWidth
          />
          <Typography variant="h6">
            Name: {name}
          </Typography>
        </Container>
      );
    }

    const rootElement = document.getElementById('root');
    const root = ReactDOM.createRoot(rootElement);
    root.render(<App />);
  </script>
</body>
</html>"""

CODE_RULES_TEXT = """\
The entire app will be in one index.html file. It will be written entirely in HTML, \
Javascript, and CSS. The design should not incorporate routes. Everything should exist \
within one page. No need for design mockups, wireframes, or external dependencies.
The entire app will be written using React and MUI. Load MUI from the CDN. Here is an example:
{skeleton}
- DO NOT DELETE PREVIOUS CODE. DO NOT RETURN A CODE SNIPPET. RETURN THE ENTIRE CODE. \
Only ADD to existing code to implement the task properly. DO NOT COMMENT PARTS OF THE \
CODE OUT AND WRITE /*...rest of the code */ or something similar. DO NOT COMMENT ANY \
PARTS OF THE CODE OUT. DO NOT COMMENT ANY PARTS OF THE CODE OUT FROM PREVIOUS CODES.
- DO NOT COMMENT {/* Other sections remain the same */}. ALL THE CODE MUST EXIST. ALL \
YOU ARE DOING IS ADDING FUNCTIONALITY. ADDING FUNCTIONALITY - DO NOT REMOVE ANY \
PREVIOUS CODE.
- The entire file should be less than {max_lines_prompted} lines of code. MUST BE LESS \
THAN {max_lines_prompted} LINES OF CODE. Anything longer than {max_lines_enforced} \
lines will be rejected outright.
- DO NOT LOAD ANYTHING ELSE IN THE CDN. Specifically, DO NOT USE: MaterialUI Icon, \
Material UI Lab.
- Do not return separate code files. All the components should be in one code file and returned.
- Do not type import statements. Assume that MUI and react are already imported \
libraries, so to use the components simply do so like this: const {Button, Container, \
Typography, TextField} = MaterialUI; or const {useState, useEffect} = React;
- DO NOT USE THESE MUI COMPONENTS: {forbidden_components} as they do not exist."""


def render_code_rules(
    max_lines_prompted: int, max_lines_enforced: int, forbidden_components: tuple[str, ...]
) -> str:
    """Fill the code-rules text with the limits the output will be linted against."""
    text = CODE_RULES_TEXT.replace("{skeleton}", MUI_SKELETON_HTML)
    text = text.replace("{max_lines_prompted}", str(max_lines_prompted))
    text = text.replace("{max_lines_enforced}", str(max_lines_enforced))
    return text.replace("{forbidden_components}", ", ".join(forbidden_components))


STEP_CODE_TEMPLATE = PromptTemplate(
    name="generate_step_code",
    role=ModelRole.CODEGEN,
    system_text=(
        "You are implementing one step of a UI prototype.\n\n{code_rules}\n\n"
        "Return the complete index.html document and nothing else."
    ),
    user_text=(
        "Project specification:\n{spec}\n\n"
        "The current task: {task}\n\n"
        "{previous_code}\n{data_note}{self_invoke_examples}{library_examples}"
        "Implement the current task and return the entire updated document."
    ),
    placeholders=frozenset(
        {
            "code_rules",
            "spec",
            "task",
            "previous_code",
            "data_note",
            "self_invoke_examples",
            "library_examples",
        }
    ),
)

NO_PREVIOUS_CODE_NOTE = (
    "There is no existing code yet; create the document from scratch based on the "
    "example structure."
)


def previous_code_block(html: str | None) -> str:
    if not html:
        return NO_PREVIOUS_CODE_NOTE
    return (
        "There is already existing code from the previously approved step. DO NOT "
        "DELETE PREVIOUS CODE; only add to it:\n" + html
    )


def data_endpoint_note(endpoint_path: str, sample_item: str | None) -> str:
    note = (
        f"Placeholder data has been pre-generated and is served as a JSON array at the "
        f'endpoint URL "{endpoint_path}". Read in the placeholder data from the '
        "endpoint with fetch; do not hardcode it."
    )
    if sample_item:
        note += f"\nThe first item looks like this:\n{sample_item}"
    return note + "\n\n"


# --- self-invocation few-shots ------------------------------------------------
# Snippets the prototype embeds to call text/image models at runtime. The
# {openai_api_key} token is written literally; substitution happens only when a
# preview is served with key injection enabled.

GPT_CALL_FEW_SHOT = """\
try {
 const response = await fetch('%COMPLETIONS_URL%', {
   method: 'POST',
   headers: {
     'Content-Type': 'application/json',
     'Authorization': `Bearer {openai_api_key}`
   },
   body: JSON.stringify({
     model: 'gpt-4',
     messages: [
       {
         role: 'system',
         content: 'You are a helpful assistant providing clothing recommendations based on user preferences.'
       },
       {
         role: 'user',
         content: `
         Based on the following preferences, provide a list of recommended clothing items in the following JSON format:
         [
           {
             "id": 6,
             "itemName": "Striped T-Shirt",
             "description": "A classic striped t-shirt made of 100% cotton",
             "imageUrl": "https://example.com/striped-tshirt.jpg",
             "size": "M",
             "brand": "H&M",
             "price": 19.99
           },
           ...
         ]

         Preferences: XYX

         Ensure the JSON is valid and adheres strictly to this format. Do not type any additional text, only provide the JSON.`
       }
     ]
   })
 });

 const result = await response.json();
 const parsedData = JSON.parse(result.choices[0].message.content);
 setRecommendations(parsedData);
} catch (err) {
 setError(err.message);
} finally {
 setLoading(false);
}"""

IMAGE_CALL_FEW_SHOT = """\
try {
  const response = await fetch('%COMPLETIONS_URL%', {
    method: 'POST',
    headers: {
      'Content-Type': 'application/json',
      'Authorization': 'Bearer {openai_api_key}'
    },
    body: JSON.stringify({
      model: 'gpt-4',
      messages: [
        {
          role: 'system',
          content: 'You are a helpful assistant providing grocery recommendations based on dietary preferences and restrictions.'
        },
        {
          role: 'user',
          content: `
          Based on the following dietary preferences and restrictions, provide a list of recommended grocery items in the following JSON format:
          [
              {
                  "name": "Organic Quinoa",
                  "description": "A gluten-free, high-protein grain.",
                  "category": "Grains",
                  "nutritionalInfo": {
                      "calories": 120,
                      "fat": 2.1,
                      "protein": 4.4,
                      "carbs": 21.3
                  },
                  "compatibility": "Vegan, Gluten-Free, Vegetarian"
              },
              ...
          ]

          Preferences and Restrictions: ${preferences}

          Ensure the JSON is valid and adheres strictly to this format. Do not type any additional text, only provide the JSON.`
        }
      ]
    })
  });

  const result = await response.json();
  const parsedData = JSON.parse(result.choices[0].message.content);

  // Fetch images for each recommendation
  for (const item of parsedData) {
    const imageResponse = await fetch('%IMAGES_URL%', {
      method: 'POST',
      headers: {
        'Content-Type': 'application/json',
        'Authorization': 'Bearer {openai_api_key}'
      },
      body: JSON.stringify({
        prompt: `An image of ${item.name}, a ${item.category} item.`,
        n: 1,
        size: "256x256"
      })
    });

    const imageResult = await imageResponse.json();
    item.imageUrl = imageResult.data[0].url;
  }

  setRecommendations(parsedData);
} catch (err) {
  setError(err.message);
} finally {
  setLoading(false);
}"""

CHART_LIBRARY_EXAMPLE = """\
Charts are drawn with Chart.js, which is pre-approved. Load it from the CDN in <head>:
<script src="https://cdn.jsdelivr.net/npm/chart.js@4"></script>
Then render into a canvas element:
const ctx = document.getElementById('chart').getContext('2d');
new Chart(ctx, { type: 'bar', data: { labels: ['A', 'B'], datasets: [{ label: 'Score', data: [3, 5] }] } });"""

DIAGRAM_LIBRARY_EXAMPLE = """\
Diagrams are drawn with GoJS, which is pre-approved. Load it from the CDN in <head>:
<script src="https://unpkg.com/gojs@2/release/go.js"></script>
Then build a diagram in a sized div:
const $ = go.GraphObject.make;
const diagram = $(go.Diagram, 'diagram-div');
diagram.model = new go.GraphLinksModel([{ key: 1, text: 'Start' }], []);"""


def gpt_call_few_shot(proxy_mode: bool) -> str:
    url = PROXY_COMPLETIONS_PATH if proxy_mode else UPSTREAM_COMPLETIONS_URL
    return GPT_CALL_FEW_SHOT.replace("%COMPLETIONS_URL%", url)


def image_call_few_shot(proxy_mode: bool) -> str:
    text = IMAGE_CALL_FEW_SHOT.replace(
        "%COMPLETIONS_URL%",
        PROXY_COMPLETIONS_PATH if proxy_mode else UPSTREAM_COMPLETIONS_URL,
    )
    return text.replace(
        "%IMAGES_URL%", PROXY_IMAGES_PATH if proxy_mode else UPSTREAM_IMAGES_URL
    )


# --- iterate / debug --------------------------------------------------------------

DEBUG_TEMPLATE = PromptTemplate(
    name="iterate_step",
    role=ModelRole.CODEGEN,
    system_text=(
        "A coding task has been implemented for a project we are working on. For "
        "context, this is the project description: {spec}. The task was this: {task}. "
        "This is the faked_data: {faked_data}. However, the task was not implemented "
        "fully correctly. The user explains what is wrong in the problem {problem}. "
        "There is already existing code in the index.html file. Using the existing "
        "code {task_code}. Please fix the problem.\n"
        "PLEASE DO NOT DELETE EXISTING CODE. ONLY FIX THE BUG.\n"
        "Return the FULL CODE NEEDED TO HAVE THE APP WORK, INSIDE THE INDEX.HTML file."
    ),
    user_text="Please fix the problem that the user describes: {problem}",
    placeholders=frozenset({"spec", "task", "faked_data", "problem", "task_code"}),
)

/** Canned usage-scenario strings, byte-identical to the server's demo
 * fixtures so replay digests resolve. */

export const PROBLEM = "learn Chinese";
export const PROJECT_NAME = "chinese-flashcards";

export const PERSON_IDEA = "Visual learners struggling with language memorization";

export const PERSON_GROUNDING = [
  "- Confusion arises due to unfamiliarity with Chinese characters and their complex structure, slowing the learning process.",
  "- Difficulty in linking characters to their corresponding meaning or pronunciation, hindering vocabulary acquisition.",
  "- Traditional memorization methods offer little aid to visual learners who could better recall information through imagery.",
].join("\n");

export const APPROACH_IDEA = "Pictorial spaced repetition learning";

export const APPROACH_GROUNDING = [
  "- Implement the spaced repetition system (SRS) algorithm to schedule review times according to each user's progress, allowing items to reappear before they're likely to be forgotten.",
  "- Incorporate visual images representing Chinese characters or words, enhancing the memory association between visual cues and corresponding meanings.",
  "- Integrate regular reviews into the learning process, which are fine-tuned according to the user's performance, to further solidify memory and retention.",
  "- Leverage cognitive science principles such as interleaving (mixing similar tasks) and retrieval practice (recalling an item from memory), to increase learning effectiveness.",
].join("\n");

export const INTERACTION_IDEA = "Simple guess-and-review quiz interface";

export const INTERACTION_GROUNDING = [
  "- The quiz interface should present the Chinese character or word along with its corresponding image.",
  "- The user then attempts to guess its meaning. If they respond accurately, the item is pushed back into the review cycle based on the SRS algorithm.",
  "- If the guess is incorrect, the correct meaning is displayed, and the item is scheduled for another review sooner.",
  "- Users should have a clear view of their progress and a way to navigate to previously learned words for self-study.",
].join("\n");

export const ITERATE_PROBLEM =
  "After I click submit, it moves on to the next question but also shows the answer of the next question.";

//! Prompt construction and answer generation over a completion client.

use serde::{Deserialize, Serialize};

use crate::exec::bounded_map;
use crate::providers::{CompletionClient, LlmError, Usage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptMode {
    WithContent,
    WithoutContent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptSpec {
    pub mode: PromptMode,
    #[serde(default)]
    pub content: Option<String>,
    pub question: String,
    #[serde(default)]
    pub book_name: Option<String>,
}

impl PromptSpec {
    pub fn with_content(content: impl Into<String>, question: impl Into<String>) -> Self {
        Self {
            mode: PromptMode::WithContent,
            content: Some(content.into()),
            question: question.into(),
            book_name: None,
        }
    }

    pub fn without_content(book_name: impl Into<String>, question: impl Into<String>) -> Self {
        Self {
            mode: PromptMode::WithoutContent,
            content: None,
            question: question.into(),
            book_name: Some(book_name.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("question is empty")]
    EmptyQuestion,
    #[error("with_content prompt has no content")]
    MissingContent,
    #[error("without_content prompt has no book name")]
    MissingBookName,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnswerError {
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Llm(#[from] LlmError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Answer {
    pub answer: String,
    pub usage: Usage,
}

pub fn build_prompt(spec: &PromptSpec) -> Result<String, PromptError> {
    if spec.question.trim().is_empty() {
        return Err(PromptError::EmptyQuestion);
    }
    match spec.mode {
        PromptMode::WithContent => {
            let content = spec.content.as_deref().ok_or(PromptError::MissingContent)?;
            Ok(format!(
                "Please answer the question based on the following content:\n\nContent: {content}\n\nQuestion: {}\n\nAnswer:",
                spec.question
            ))
        }
        PromptMode::WithoutContent => {
            let book =
                spec.book_name.as_deref().filter(|b| !b.trim().is_empty()).ok_or(PromptError::MissingBookName)?;
            Ok(format!(
                "Please answer the question based on your memory of the book {book}:\n\nQuestion: {}\n\nAnswer:",
                spec.question
            ))
        }
    }
}

/// Builds the prompt, asks the client, and trims the reply.
pub fn answer(spec: &PromptSpec, llm: &dyn CompletionClient) -> Result<Answer, AnswerError> {
    let prompt = build_prompt(spec)?;
    let completion = llm.complete(&prompt)?;
    Ok(Answer { answer: completion.text.trim().to_string(), usage: completion.usage })
}

/// Answers every spec with at most `max_in_flight` outstanding requests.
/// Results come back in input order; a failed item does not stop the rest.
pub fn answer_batch(
    specs: &[PromptSpec],
    llm: &dyn CompletionClient,
    max_in_flight: usize,
) -> Vec<Result<Answer, AnswerError>> {
    bounded_map(specs, max_in_flight.max(1), |_, spec| answer(spec, llm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::providers::{StubLlm, StubMode};

    #[test]
    fn with_content_template_is_exact() {
        assert_eq!(
            build_prompt(&PromptSpec::with_content("X", "Q?")).unwrap(),
            "Please answer the question based on the following content:\n\nContent: X\n\nQuestion: Q?\n\nAnswer:"
        );
    }

    #[test]
    fn memory_template_names_the_book() {
        let p = build_prompt(&PromptSpec::without_content("The Tale of Peter Rabbit", "Q?")).unwrap();
        assert_eq!(
            p,
            "Please answer the question based on your memory of the book The Tale of Peter Rabbit:\n\nQuestion: Q?\n\nAnswer:"
        );
    }

    #[test]
    fn invalid_specs() {
        assert_eq!(build_prompt(&PromptSpec::with_content("X", "  ")), Err(PromptError::EmptyQuestion));
        let mut s = PromptSpec::with_content("X", "Q?");
        s.content = None;
        assert_eq!(build_prompt(&s), Err(PromptError::MissingContent));
        let mut s = PromptSpec::without_content("B", "Q?");
        s.book_name = None;
        assert_eq!(build_prompt(&s), Err(PromptError::MissingBookName));
    }

    #[test]
    fn echo_stub_returns_last_line() {
        let llm = StubLlm::new(StubMode::EchoLastLine);
        let a = answer(&PromptSpec::with_content("X", "Q?"), &llm).unwrap();
        assert_eq!(a.answer, "Answer:");
    }

    #[test]
    fn empty_batch() {
        let llm = StubLlm::new(StubMode::EchoLastLine);
        assert!(answer_batch(&[], &llm, 4).is_empty());
    }
}

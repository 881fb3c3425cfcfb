use std::borrow::Cow;

use serde::{Deserialize, Serialize};

use crate::parser::{serialize, TemplateConfig};
use crate::retrieval::ExampleConversation;

const DEFAULT_INSTRUCTION: &str = include_str!("../../assets/system_instruction.txt");

/// The four families of spatial auditory cues the instruction must cover.
pub const CUE_FAMILIES: [&str; 4] = ["interaural time difference", "interaural level difference", "pitch and volume", "directional shift"];

/// System instruction template. `{width}`, `{height}`, `{frames}` and the
/// template markers are substituted per request.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemInstruction {
    template: Cow<'static, str>,
}

impl Default for SystemInstruction {
    fn default() -> Self {
        SystemInstruction { template: Cow::Borrowed(DEFAULT_INSTRUCTION) }
    }
}

impl SystemInstruction {
    pub fn from_template(template: impl Into<String>) -> Self {
        SystemInstruction { template: Cow::Owned(template.into()) }
    }

    /// Cue families the template fails to mention.
    pub fn missing_cues(&self) -> Vec<&'static str> {
        let lower = self.template.to_lowercase();
        CUE_FAMILIES.iter().copied().filter(|c| !lower.contains(c)).collect()
    }

    pub fn render(&self, template: &TemplateConfig) -> String {
        self.template
            .replace("{width}", &template.canvas.width.to_string())
            .replace("{height}", &template.canvas.height.to_string())
            .replace("{frames}", &template.expected_keyframes.to_string())
            .replace("{reasoning_marker}", &template.reasoning_marker)
            .replace("{caption_marker}", &template.caption_marker)
            .replace("{layout_marker}", &template.layout_marker)
            .replace("{frame_marker}", &template.frame_marker)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ContentPart {
    Text { text: String },
    Audio { audio_ref: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub parts: Vec<ContentPart>,
}

impl ChatMessage {
    pub fn text(role: Role, text: impl Into<String>) -> Self {
        ChatMessage { role, parts: vec![ContentPart::Text { text: text.into() }] }
    }

    pub fn audio(role: Role, prompt: impl Into<String>, audio_ref: impl Into<String>) -> Self {
        ChatMessage {
            role,
            parts: vec![ContentPart::Text { text: prompt.into() }, ContentPart::Audio { audio_ref: audio_ref.into() }],
        }
    }

    /// Concatenated text parts.
    pub fn text_content(&self) -> String {
        self.parts
            .iter()
            .filter_map(|p| match p {
                ContentPart::Text { text } => Some(text.as_str()),
                ContentPart::Audio { .. } => None,
            })
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn audio_refs(&self) -> impl Iterator<Item = &str> {
        self.parts.iter().filter_map(|p| match p {
            ContentPart::Audio { audio_ref } => Some(audio_ref.as_str()),
            ContentPart::Text { .. } => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub temperature: f64,
    pub messages: Vec<ChatMessage>,
}

impl ChatRequest {
    /// Audio reference of the latest user message that carries one.
    pub fn query_audio(&self) -> Option<&str> {
        self.messages.iter().rev().filter(|m| m.role == Role::User).find_map(|m| m.audio_refs().next())
    }
}

pub const QUERY_PROMPT: &str = "Plan the video scene layout for this audio recording.";

/// Assistant turn of an example: the reasoning statement, then the layout.
pub fn example_response(example: &ExampleConversation, template: &TemplateConfig) -> String {
    let mut vsl = example.vsl.clone();
    vsl.reasoning = Some(example.reasoning.clone());
    serialize(&vsl, template)
}

/// `[system] + [user(example audio), assistant(example answer)] * k + [user(query audio)]`
pub fn assemble_prompt(
    instruction: &SystemInstruction,
    examples: &[&ExampleConversation],
    query_audio_ref: &str,
    template: &TemplateConfig,
    model: &str,
    temperature: f64,
) -> ChatRequest {
    let mut messages = Vec::with_capacity(2 + 2 * examples.len());
    messages.push(ChatMessage::text(Role::System, instruction.render(template)));
    for ex in examples {
        messages.push(ChatMessage::audio(Role::User, QUERY_PROMPT, ex.audio_ref.clone()));
        messages.push(ChatMessage::text(Role::Assistant, example_response(ex, template)));
    }
    messages.push(ChatMessage::audio(Role::User, QUERY_PROMPT, query_audio_ref));
    ChatRequest { model: model.to_string(), temperature, messages }
}

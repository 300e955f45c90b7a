//! Minimal non-validating XML element tree.
//!
//! No DTD processing: only the predefined entities and character references
//! are expanded. Text and markup outside the root element are ignored.

use quick_xml::events::Event;
use quick_xml::Reader;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum XmlError {
    #[error("XML syntax error at byte {offset}: {message}")]
    Syntax { offset: u64, message: String },
    #[error("document has no root element")]
    NoRoot,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Element(Element),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Element {
    pub name: String,
    pub attrs: Vec<(String, String)>,
    pub children: Vec<Node>,
}

impl Element {
    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }

    pub fn elements(&self) -> impl Iterator<Item = &Element> {
        self.children.iter().filter_map(|c| match c {
            Node::Element(e) => Some(e),
            Node::Text(_) => None,
        })
    }

    /// Concatenated direct text content.
    pub fn text(&self) -> String {
        self.children
            .iter()
            .filter_map(|c| match c {
                Node::Text(t) => Some(t.as_str()),
                Node::Element(_) => None,
            })
            .collect()
    }
}

pub fn parse_xml(bytes: &[u8]) -> Result<Element, XmlError> {
    let mut reader = Reader::from_reader(bytes);
    reader.config_mut().trim_text(false);
    let mut stack: Vec<Element> = Vec::new();
    let mut root = None;
    let syntax = |reader: &Reader<&[u8]>, e: &dyn std::fmt::Display| XmlError::Syntax {
        offset: reader.error_position(),
        message: e.to_string(),
    };
    loop {
        let ev = reader.read_event().map_err(|e| syntax(&reader, &e))?;
        match ev {
            Event::Start(_) | Event::Empty(_) if root.is_some() => {}
            Event::Start(s) => {
                stack.push(open_element(&s).map_err(|e| syntax(&reader, &e))?);
            }
            Event::Empty(s) => {
                let el = open_element(&s).map_err(|e| syntax(&reader, &e))?;
                close_into(&mut stack, &mut root, el);
            }
            Event::End(_) => {
                if let Some(el) = stack.pop() {
                    close_into(&mut stack, &mut root, el);
                }
            }
            Event::Text(t) => {
                if let Some(top) = stack.last_mut() {
                    let s = t.unescape().map_err(|e| syntax(&reader, &e))?;
                    push_text(top, &s);
                }
            }
            Event::CData(c) => {
                if let Some(top) = stack.last_mut() {
                    push_text(top, &String::from_utf8_lossy(&c.into_inner()));
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if !stack.is_empty() {
        return Err(XmlError::Syntax {
            offset: bytes.len() as u64,
            message: format!("unclosed element <{}>", stack.last().unwrap().name),
        });
    }
    root.ok_or(XmlError::NoRoot)
}

fn open_element(s: &quick_xml::events::BytesStart<'_>) -> Result<Element, quick_xml::Error> {
    let mut el = Element {
        name: String::from_utf8_lossy(s.name().as_ref()).into_owned(),
        ..Default::default()
    };
    for a in s.attributes() {
        let a = a.map_err(quick_xml::Error::from)?;
        let key = String::from_utf8_lossy(a.key.as_ref()).into_owned();
        let value = a.unescape_value()?.into_owned();
        el.attrs.push((key, value));
    }
    Ok(el)
}

fn close_into(stack: &mut [Element], root: &mut Option<Element>, el: Element) {
    match stack.last_mut() {
        Some(parent) => parent.children.push(Node::Element(el)),
        None => {
            if root.is_none() {
                *root = Some(el);
            }
        }
    }
}

fn push_text(el: &mut Element, s: &str) {
    if let Some(Node::Text(prev)) = el.children.last_mut() {
        prev.push_str(s);
    } else {
        el.children.push(Node::Text(s.to_string()));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_elements_and_text() {
        let e =
            parse_xml(b"<?xml version=\"1.0\"?><a x=\"1\"><b>hi &amp; bye</b><c/></a>").unwrap();
        assert_eq!(e.name, "a");
        assert_eq!(e.attr("x"), Some("1"));
        let kids: Vec<_> = e.elements().collect();
        assert_eq!(kids[0].text(), "hi & bye");
        assert_eq!(kids[1].name, "c");
    }

    #[test]
    fn text_outside_root_ignored() {
        let e = parse_xml(b"<?xml version=\"1.0\"?>\n- <map>\n</map>\ntrailing").unwrap();
        assert_eq!(e.name, "map");
    }

    #[test]
    fn custom_entities_not_expanded() {
        let doc = b"<!DOCTYPE a [<!ENTITY x \"boom\">]><a>&x;</a>";
        assert!(parse_xml(doc).is_err());
    }

    #[test]
    fn errors() {
        assert_eq!(parse_xml(b"").unwrap_err(), XmlError::NoRoot);
        assert!(matches!(
            parse_xml(b"<a><b></a>"),
            Err(XmlError::Syntax { .. })
        ));
        assert!(matches!(parse_xml(b"<a>"), Err(XmlError::Syntax { .. })));
    }
}

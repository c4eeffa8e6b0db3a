use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use quick_xml::events::{BytesDecl, BytesEnd, BytesStart, BytesText, Event};
use quick_xml::{Reader, Writer};

use super::{InteractionGraph, TimeWindow};
use crate::corpus::Annotations;
use crate::stance::StanceMap;

const GRAPHML_NS: &str = "http://graphml.graphdrawing.org/xmlns";
const NODE_KEYS: [&str; 3] = ["user_id", "stance", "category"];

#[derive(Debug, thiserror::Error)]
pub enum GraphmlError {
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("xml: {0}")]
    Xml(#[from] quick_xml::Error),
    #[error("invalid graphml: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NodeAttrs {
    pub stance: String,
    pub category: String,
}

/// Writes `g` as GraphML. Node element ids are `n<index>`; the user id is
/// carried in the `user_id` data key.
pub fn write_graphml<W: Write>(
    g: &InteractionGraph,
    attrs: impl Fn(&str) -> NodeAttrs,
    out: W,
) -> Result<(), GraphmlError> {
    let mut w = Writer::new_with_indent(out, b' ', 2);
    w.write_event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)))?;
    w.write_event(Event::Start(
        BytesStart::new("graphml").with_attributes([("xmlns", GRAPHML_NS)]),
    ))?;
    for key in NODE_KEYS {
        w.write_event(Event::Empty(BytesStart::new("key").with_attributes([
            ("id", key),
            ("for", "node"),
            ("attr.name", key),
            ("attr.type", "string"),
        ])))?;
    }
    w.write_event(Event::Start(
        BytesStart::new("graph").with_attributes([("id", "G"), ("edgedefault", "undirected")]),
    ))?;
    for (i, id) in g.nodes().iter().enumerate() {
        let a = attrs(id);
        let node_id = format!("n{i}");
        w.write_event(Event::Start(
            BytesStart::new("node").with_attributes([("id", node_id.as_str())]),
        ))?;
        for (key, value) in NODE_KEYS.iter().zip([id.as_str(), &a.stance, &a.category]) {
            w.write_event(Event::Start(
                BytesStart::new("data").with_attributes([("key", *key)]),
            ))?;
            w.write_event(Event::Text(BytesText::new(value)))?;
            w.write_event(Event::End(BytesEnd::new("data")))?;
        }
        w.write_event(Event::End(BytesEnd::new("node")))?;
    }
    for (i, j) in g.edges() {
        let (s, t) = (format!("n{i}"), format!("n{j}"));
        w.write_event(Event::Empty(
            BytesStart::new("edge")
                .with_attributes([("source", s.as_str()), ("target", t.as_str())]),
        ))?;
    }
    w.write_event(Event::End(BytesEnd::new("graph")))?;
    w.write_event(Event::End(BytesEnd::new("graphml")))?;
    w.get_mut().write_all(b"\n")?;
    Ok(())
}

/// Writes `g` to `path` with stance and annotation category node attributes.
pub fn export_graph(
    g: &InteractionGraph,
    stances: &StanceMap,
    annotations: &Annotations,
    path: impl AsRef<Path>,
) -> Result<(), GraphmlError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| GraphmlError::Write {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = BufWriter::new(file);
    write_graphml(
        g,
        |id| NodeAttrs {
            stance: stances.stance_of(id).to_string(),
            category: annotations
                .category_of(id)
                .map_or_else(|| "Unannotated".to_string(), |c| c.to_string()),
        },
        &mut out,
    )?;
    out.flush()?;
    Ok(())
}

/// Result of reading a GraphML file back.
#[derive(Debug, Clone)]
pub struct ImportedGraph {
    pub graph: InteractionGraph,
    pub attrs: BTreeMap<String, NodeAttrs>,
}

pub fn read_graphml<R: BufRead>(input: R) -> Result<ImportedGraph, GraphmlError> {
    let mut reader = Reader::from_reader(input);
    reader.config_mut().trim_text(true);
    let mut buf = Vec::new();

    let mut element_to_user: BTreeMap<String, String> = BTreeMap::new();
    let mut attrs: BTreeMap<String, NodeAttrs> = BTreeMap::new();
    let mut raw_edges: Vec<(String, String)> = Vec::new();

    let mut current_node: Option<(String, BTreeMap<String, String>)> = None;
    let mut current_key: Option<String> = None;

    loop {
        match reader.read_event_into(&mut buf)? {
            Event::Eof => break,
            Event::Start(e) | Event::Empty(e) if e.name().as_ref() == b"edge" => {
                let mut source = None;
                let mut target = None;
                for a in e.attributes() {
                    let a = a.map_err(quick_xml::Error::from)?;
                    match a.key.as_ref() {
                        b"source" => source = Some(a.unescape_value()?.into_owned()),
                        b"target" => target = Some(a.unescape_value()?.into_owned()),
                        _ => {}
                    }
                }
                match (source, target) {
                    (Some(s), Some(t)) => raw_edges.push((s, t)),
                    _ => return Err(GraphmlError::Invalid("edge without endpoints".into())),
                }
            }
            Event::Start(e) if e.name().as_ref() == b"node" => {
                let id = attr(&e, b"id")?
                    .ok_or_else(|| GraphmlError::Invalid("node without id".into()))?;
                current_node = Some((id, BTreeMap::new()));
            }
            Event::Empty(e) if e.name().as_ref() == b"node" => {
                let id = attr(&e, b"id")?
                    .ok_or_else(|| GraphmlError::Invalid("node without id".into()))?;
                element_to_user.insert(id.clone(), id.clone());
                attrs.insert(id, NodeAttrs::default());
            }
            Event::Start(e) if e.name().as_ref() == b"data" => {
                current_key = attr(&e, b"key")?;
            }
            Event::Text(t) => {
                if let (Some((_, data)), Some(key)) = (current_node.as_mut(), current_key.as_ref())
                {
                    data.insert(key.clone(), t.unescape()?.into_owned());
                }
            }
            Event::End(e) if e.name().as_ref() == b"data" => current_key = None,
            Event::End(e) if e.name().as_ref() == b"node" => {
                let (elem, mut data) = current_node
                    .take()
                    .ok_or_else(|| GraphmlError::Invalid("unbalanced node".into()))?;
                let user = data.remove("user_id").unwrap_or_else(|| elem.clone());
                attrs.insert(
                    user.clone(),
                    NodeAttrs {
                        stance: data.remove("stance").unwrap_or_default(),
                        category: data.remove("category").unwrap_or_default(),
                    },
                );
                element_to_user.insert(elem, user);
            }
            _ => {}
        }
        buf.clear();
    }

    let mut edges = Vec::with_capacity(raw_edges.len());
    for (s, t) in raw_edges {
        let lookup = |e: &str| {
            element_to_user
                .get(e)
                .cloned()
                .ok_or_else(|| GraphmlError::Invalid(format!("edge endpoint {e} is not a node")))
        };
        edges.push((lookup(&s)?, lookup(&t)?));
    }
    let graph = InteractionGraph::from_edges(TimeWindow::unbounded(), attrs.keys().cloned(), edges);
    Ok(ImportedGraph { graph, attrs })
}

fn attr(e: &BytesStart<'_>, name: &[u8]) -> Result<Option<String>, GraphmlError> {
    for a in e.attributes() {
        let a = a.map_err(quick_xml::Error::from)?;
        if a.key.as_ref() == name {
            return Ok(Some(a.unescape_value()?.into_owned()));
        }
    }
    Ok(None)
}

/// Writes one `a b` line per edge, smaller id first, lines sorted.
pub fn write_edge_list<W: Write>(g: &InteractionGraph, mut out: W) -> std::io::Result<()> {
    // ids are sorted by index, so index order is already lexicographic
    for (a, b) in g.edge_ids() {
        writeln!(out, "{a} {b}")?;
    }
    Ok(())
}

pub fn read_graphml_file(path: &Path) -> Result<ImportedGraph, GraphmlError> {
    read_graphml(BufReader::new(File::open(path)?))
}

//! ISPD-2005 Bookshelf reader and writer.
//!
//! Bookshelf `.pl` files store lower-left corners; everything in memory is
//! center-based, so the conversion happens here and nowhere else.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{PlaceError, Result};
use crate::model::{Netlist, Node, NodeKind, PlacementState, Region, Row};

/// A parsed benchmark.
#[derive(Debug, Clone)]
pub struct Design {
    pub netlist: Netlist,
    pub region: Region,
    /// Movable centers from the `.pl` file.
    pub placement: PlacementState,
}

/// Non-comment, non-blank lines with their 1-based line numbers.
struct Lines {
    path: PathBuf,
    lines: Vec<(usize, String)>,
    pos: usize,
}

impl Lines {
    fn open(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(PlaceError::MissingFile {
                path: path.to_path_buf(),
            });
        }
        let text = fs::read_to_string(path).map_err(|e| PlaceError::io(path, e))?;
        let lines = text
            .lines()
            .enumerate()
            .filter_map(|(i, l)| {
                let l = l.split('#').next().unwrap_or("").trim();
                (!l.is_empty()).then(|| (i + 1, l.to_string()))
            })
            .collect();
        Ok(Lines {
            path: path.to_path_buf(),
            lines,
            pos: 0,
        })
    }

    fn next(&mut self) -> Option<(usize, String)> {
        let item = self.lines.get(self.pos)?.clone();
        self.pos += 1;
        Some(item)
    }

    fn peek(&self) -> Option<(usize, &str)> {
        self.lines.get(self.pos).map(|(n, l)| (*n, l.as_str()))
    }

    fn last_line(&self) -> usize {
        self.lines.last().map_or(1, |(n, _)| *n)
    }

    fn header(&mut self, kind: &str) -> Result<()> {
        let path = self.path.clone();
        let (line, text) = self.next().ok_or_else(|| PlaceError::BadHeader {
            path: path.clone(),
            line: 1,
            message: "empty file".into(),
        })?;
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.len() < 3 || toks[0] != "UCLA" || toks[1] != kind {
            return Err(PlaceError::BadHeader {
                path,
                line,
                message: format!("expected `UCLA {kind} 1.0`, got `{text}`"),
            });
        }
        Ok(())
    }

    fn syntax(&self, line: usize, message: impl Into<String>) -> PlaceError {
        PlaceError::Syntax {
            path: self.path.clone(),
            line,
            message: message.into(),
        }
    }

    /// Parses `Key : value` at the cursor if the key matches.
    fn keyed_count(&mut self, key: &str) -> Result<Option<(usize, usize)>> {
        let Some((line, text)) = self.peek() else {
            return Ok(None);
        };
        let toks = tokens(text);
        if toks.first().map(String::as_str) != Some(key) {
            return Ok(None);
        }
        let value = toks
            .iter()
            .skip(1)
            .find(|t| t.as_str() != ":")
            .and_then(|t| t.parse::<usize>().ok())
            .ok_or_else(|| self.syntax(line, format!("bad `{key}` record")))?;
        self.pos += 1;
        Ok(Some((line, value)))
    }
}

/// Splits on whitespace and treats every `:` as its own token.
fn tokens(text: impl AsRef<str>) -> Vec<String> {
    text.as_ref()
        .replace(':', " : ")
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

fn parse_f64(lines: &Lines, line: usize, tok: Option<&String>, what: &str) -> Result<f64> {
    tok.and_then(|t| t.parse::<f64>().ok())
        .filter(|v| v.is_finite())
        .ok_or_else(|| lines.syntax(line, format!("expected numeric {what}")))
}

struct AuxFiles {
    nodes: PathBuf,
    nets: PathBuf,
    wts: Option<PathBuf>,
    pl: PathBuf,
    scl: PathBuf,
}

fn parse_aux(path: &Path) -> Result<AuxFiles> {
    let mut lines = Lines::open(path)?;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let (line, text) = lines
        .next()
        .ok_or_else(|| lines.syntax(1, "empty .aux file"))?;
    let toks = tokens(&text);
    if toks.len() < 3 || toks[1] != ":" {
        return Err(PlaceError::BadHeader {
            path: path.to_path_buf(),
            line,
            message: format!("expected `RowBasedPlacement : <files>`, got `{text}`"),
        });
    }
    let find = |ext: &str| {
        toks[2..]
            .iter()
            .find(|t| t.ends_with(ext))
            .map(|t| dir.join(t))
    };
    let need = |ext: &str| {
        find(ext).ok_or_else(|| PlaceError::Syntax {
            path: path.to_path_buf(),
            line,
            message: format!("no {ext} file listed"),
        })
    };
    let files = AuxFiles {
        nodes: need(".nodes")?,
        nets: need(".nets")?,
        wts: find(".wts"),
        pl: need(".pl")?,
        scl: need(".scl")?,
    };
    for p in [&files.nodes, &files.nets, &files.pl, &files.scl]
        .into_iter()
        .chain(files.wts.as_ref())
    {
        if !p.exists() {
            return Err(PlaceError::MissingFile { path: p.clone() });
        }
    }
    Ok(files)
}

fn parse_nodes(path: &Path) -> Result<Vec<Node>> {
    let mut lines = Lines::open(path)?;
    lines.header("nodes")?;
    let mut num_nodes = None;
    let mut num_terms = None;
    loop {
        if let Some(v) = lines.keyed_count("NumNodes")? {
            num_nodes = Some(v);
        } else if let Some(v) = lines.keyed_count("NumTerminals")? {
            num_terms = Some(v);
        } else {
            break;
        }
    }
    let mut nodes = Vec::new();
    while let Some((line, text)) = lines.next() {
        let toks: Vec<String> = text.split_whitespace().map(str::to_string).collect();
        if toks.len() < 3 {
            return Err(lines.syntax(line, format!("bad node record `{text}`")));
        }
        let width = parse_f64(&lines, line, toks.get(1), "width")?;
        let height = parse_f64(&lines, line, toks.get(2), "height")?;
        let (kind, non_image) = match toks.get(3).map(String::as_str) {
            None => (NodeKind::Movable, false),
            Some("terminal") => (NodeKind::Fixed, false),
            Some("terminal_NI") => (NodeKind::Fixed, true),
            Some(other) => {
                return Err(lines.syntax(line, format!("unknown node attribute `{other}`")))
            }
        };
        if kind == NodeKind::Movable && !(width > 0.0 && height > 0.0) {
            return Err(lines.syntax(line, "movable node with non-positive size"));
        }
        nodes.push(Node {
            id: nodes.len(),
            name: toks[0].clone(),
            kind,
            width,
            height,
            center: (0.5 * width, 0.5 * height),
            charge: Node::charge_for(kind, width * height, 1.0),
            non_image,
        });
    }
    let end = lines.last_line();
    if let Some((line, declared)) = num_nodes {
        if declared != nodes.len() {
            return Err(PlaceError::CountMismatch {
                path: path.to_path_buf(),
                line,
                what: "NumNodes",
                declared,
                found: nodes.len(),
            });
        }
    }
    if let Some((line, declared)) = num_terms {
        let found = nodes.iter().filter(|n| n.kind == NodeKind::Fixed).count();
        if declared != found {
            return Err(PlaceError::CountMismatch {
                path: path.to_path_buf(),
                line,
                what: "NumTerminals",
                declared,
                found,
            });
        }
    }
    if num_nodes.is_none() && nodes.is_empty() {
        return Err(lines.syntax(end, "no nodes"));
    }
    Ok(nodes)
}

type RawNets = Vec<(String, Vec<(usize, (f64, f64))>)>;

fn parse_nets(path: &Path, index: &std::collections::HashMap<String, usize>) -> Result<RawNets> {
    let mut lines = Lines::open(path)?;
    lines.header("nets")?;
    let mut num_nets = None;
    let mut num_pins = None;
    loop {
        if let Some(v) = lines.keyed_count("NumNets")? {
            num_nets = Some(v);
        } else if let Some(v) = lines.keyed_count("NumPins")? {
            num_pins = Some(v);
        } else {
            break;
        }
    }
    let mut nets: RawNets = Vec::new();
    let mut total_pins = 0usize;
    while let Some((line, text)) = lines.next() {
        let toks = tokens(&text);
        if toks.first().map(String::as_str) != Some("NetDegree") {
            return Err(lines.syntax(line, format!("expected NetDegree, got `{text}`")));
        }
        let degree = toks
            .get(2)
            .and_then(|t| t.parse::<usize>().ok())
            .ok_or_else(|| lines.syntax(line, "bad NetDegree record"))?;
        if degree == 0 {
            return Err(lines.syntax(line, "net of degree 0"));
        }
        let name = toks
            .get(3)
            .cloned()
            .unwrap_or_else(|| format!("net{}", nets.len()));
        let mut members = Vec::with_capacity(degree);
        for found in 0..degree {
            let next = lines.peek();
            let Some((pline, ptext)) = next.filter(|(_, t)| !t.starts_with("NetDegree")) else {
                return Err(PlaceError::CountMismatch {
                    path: path.to_path_buf(),
                    line,
                    what: "NetDegree",
                    declared: degree,
                    found,
                });
            };
            let ptoks = tokens(ptext);
            lines.pos += 1;
            let node = *index
                .get(&ptoks[0])
                .ok_or_else(|| PlaceError::UnknownNode {
                    path: path.to_path_buf(),
                    line: pline,
                    name: ptoks[0].clone(),
                })?;
            let offset = match ptoks.iter().position(|t| t == ":") {
                Some(c) => (
                    parse_f64(&lines, pline, ptoks.get(c + 1), "pin x offset")?,
                    parse_f64(&lines, pline, ptoks.get(c + 2), "pin y offset")?,
                ),
                None => (0.0, 0.0),
            };
            members.push((node, offset));
        }
        // Extra pin lines before the next NetDegree mean the degree was short.
        if let Some((_, t)) = lines.peek() {
            if !t.starts_with("NetDegree") {
                let mut found = degree;
                while lines
                    .peek()
                    .is_some_and(|(_, t)| !t.starts_with("NetDegree"))
                {
                    lines.pos += 1;
                    found += 1;
                }
                return Err(PlaceError::CountMismatch {
                    path: path.to_path_buf(),
                    line,
                    what: "NetDegree",
                    declared: degree,
                    found,
                });
            }
        }
        total_pins += degree;
        nets.push((name, members));
    }
    if let Some((line, declared)) = num_nets {
        if declared != nets.len() {
            return Err(PlaceError::CountMismatch {
                path: path.to_path_buf(),
                line,
                what: "NumNets",
                declared,
                found: nets.len(),
            });
        }
    }
    if let Some((line, declared)) = num_pins {
        if declared != total_pins {
            return Err(PlaceError::CountMismatch {
                path: path.to_path_buf(),
                line,
                what: "NumPins",
                declared,
                found: total_pins,
            });
        }
    }
    Ok(nets)
}

/// Reads lower-left positions from a `.pl` file into node centers.
fn parse_pl(
    path: &Path,
    nodes: &mut [Node],
    index: &std::collections::HashMap<String, usize>,
) -> Result<()> {
    let mut lines = Lines::open(path)?;
    lines.header("pl")?;
    while let Some((line, text)) = lines.next() {
        let toks = tokens(&text);
        if toks.len() < 3 {
            return Err(lines.syntax(line, format!("bad placement record `{text}`")));
        }
        let id = *index.get(&toks[0]).ok_or_else(|| PlaceError::UnknownNode {
            path: path.to_path_buf(),
            line,
            name: toks[0].clone(),
        })?;
        let x = parse_f64(&lines, line, toks.get(1), "x")?;
        let y = parse_f64(&lines, line, toks.get(2), "y")?;
        let node = &mut nodes[id];
        node.center = (x + 0.5 * node.width, y + 0.5 * node.height);
        if toks.iter().any(|t| t.starts_with("/FIXED")) && node.kind == NodeKind::Movable {
            node.kind = NodeKind::Fixed;
            node.non_image = toks.iter().any(|t| t == "/FIXED_NI");
            node.charge = Node::charge_for(NodeKind::Fixed, node.area(), 1.0);
        }
    }
    Ok(())
}

fn parse_scl(path: &Path) -> Result<Vec<Row>> {
    let mut lines = Lines::open(path)?;
    lines.header("scl")?;
    let mut declared = None;
    if let Some(v) = lines.keyed_count("NumRows")? {
        declared = Some(v);
    }
    let mut rows = Vec::new();
    while let Some((line, text)) = lines.next() {
        if !text.starts_with("CoreRow") {
            return Err(lines.syntax(line, format!("expected CoreRow, got `{text}`")));
        }
        let start = line;
        let mut y = None;
        let mut height = None;
        let mut site_width = 1.0;
        let mut site_spacing = None;
        let mut origin = None;
        let mut num_sites = None;
        loop {
            let Some((l, t)) = lines.next() else {
                return Err(lines.syntax(start, "CoreRow without End"));
            };
            if t == "End" {
                break;
            }
            let toks = tokens(&t);
            let mut i = 0;
            while i + 2 < toks.len() && toks[i + 1] == ":" {
                let v = parse_f64(&lines, l, toks.get(i + 2), &toks[i])?;
                match toks[i].as_str() {
                    "Coordinate" => y = Some(v),
                    "Height" => height = Some(v),
                    "Sitewidth" => site_width = v,
                    "Sitespacing" => site_spacing = Some(v),
                    "SubrowOrigin" => origin = Some(v),
                    "NumSites" => num_sites = Some(v),
                    _ => {}
                }
                i += 3;
            }
        }
        let (Some(y), Some(height), Some(origin), Some(num_sites)) = (y, height, origin, num_sites)
        else {
            return Err(lines.syntax(
                start,
                "CoreRow missing Coordinate, Height, SubrowOrigin or NumSites",
            ));
        };
        let spacing = site_spacing.unwrap_or(site_width);
        rows.push(Row {
            y,
            height,
            x_lo: origin,
            x_hi: origin + num_sites * spacing,
            site_width: spacing,
        });
    }
    if let Some((line, declared)) = declared {
        if declared != rows.len() {
            return Err(PlaceError::CountMismatch {
                path: path.to_path_buf(),
                line,
                what: "NumRows",
                declared,
                found: rows.len(),
            });
        }
    }
    Ok(rows)
}

fn check_wts(path: &Path) -> Result<()> {
    // Net weights are read for format validation only; every net has weight 1.
    let mut lines = Lines::open(path)?;
    lines.header("wts")
}

/// Loads a benchmark from its `.aux` manifest.
pub fn parse_bookshelf(aux_path: impl AsRef<Path>) -> Result<Design> {
    let aux = parse_aux(aux_path.as_ref())?;
    let mut nodes = parse_nodes(&aux.nodes)?;
    let index: std::collections::HashMap<String, usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.name.clone(), i))
        .collect();
    let nets = parse_nets(&aux.nets, &index)?;
    if let Some(wts) = &aux.wts {
        check_wts(wts)?;
    }
    parse_pl(&aux.pl, &mut nodes, &index)?;
    let rows = parse_scl(&aux.scl)?;
    let region = Region::from_rows(rows)?;
    let netlist = Netlist::new(nodes, nets)?;
    let placement = netlist.stored_placement();
    log::info!(
        "parsed {}: {} movable, {} fixed, {} nets, {} pins, {} rows",
        aux_path.as_ref().display(),
        netlist.num_movable(),
        netlist.fixed().len(),
        netlist.nets.len(),
        netlist.pins.len(),
        region.rows.len()
    );
    Ok(Design {
        netlist,
        region,
        placement,
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| PlaceError::io(path, e))
}

/// Writes a `.pl` file: lower-left corners, fixed nodes marked `/FIXED`.
/// Only the first `num_movable` entries of `placement` are used, so filler
/// cells never reach the output.
pub fn write_pl(
    placement: &PlacementState,
    netlist: &Netlist,
    path: impl AsRef<Path>,
) -> Result<()> {
    let m = netlist.num_movable();
    if placement.len() < m {
        return Err(PlaceError::InvalidArgument(format!(
            "placement has {} entries for {m} movable nodes",
            placement.len()
        )));
    }
    if !placement.truncated(m).is_finite() {
        return Err(PlaceError::NonFinite("placement".into()));
    }
    let mut out = String::from("UCLA pl 1.0\n\n");
    for node in &netlist.nodes {
        let (cx, cy) = if node.id < m {
            (placement.x[node.id], placement.y[node.id])
        } else {
            node.center
        };
        let x = cx - 0.5 * node.width;
        let y = cy - 0.5 * node.height;
        let _ = write!(out, "{}\t{}\t{}\t: N", node.name, x, y);
        if node.kind == NodeKind::Fixed {
            out.push_str(if node.non_image {
                " /FIXED_NI"
            } else {
                " /FIXED"
            });
        }
        out.push('\n');
    }
    write_file(path.as_ref(), &out)
}

/// Writes a complete benchmark (`.aux` plus the five data files) named
/// `name` into `dir` and returns the `.aux` path.
pub fn write_bookshelf(
    dir: impl AsRef<Path>,
    name: &str,
    netlist: &Netlist,
    region: &Region,
    placement: &PlacementState,
) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| PlaceError::io(dir, e))?;

    let mut nodes = String::from("UCLA nodes 1.0\n\n");
    let terms = netlist.fixed().len();
    let _ = writeln!(nodes, "NumNodes : {}", netlist.nodes.len());
    let _ = writeln!(nodes, "NumTerminals : {terms}");
    for n in &netlist.nodes {
        let _ = write!(nodes, "\t{}\t{}\t{}", n.name, n.width, n.height);
        if n.kind == NodeKind::Fixed {
            nodes.push_str(if n.non_image {
                "\tterminal_NI"
            } else {
                "\tterminal"
            });
        }
        nodes.push('\n');
    }

    let mut nets = String::from("UCLA nets 1.0\n\n");
    let _ = writeln!(nets, "NumNets : {}", netlist.nets.len());
    let _ = writeln!(nets, "NumPins : {}", netlist.pins.len());
    for net in &netlist.nets {
        let _ = writeln!(nets, "NetDegree : {} {}", net.degree(), net.name);
        for pin in netlist.net_pins(net) {
            let _ = writeln!(
                nets,
                "\t{}\tB : {} {}",
                netlist.nodes[pin.node].name, pin.offset.0, pin.offset.1
            );
        }
    }

    let mut wts = String::from("UCLA wts 1.0\n\n");
    for net in &netlist.nets {
        let _ = writeln!(wts, "{} 1", net.name);
    }

    let mut scl = String::from("UCLA scl 1.0\n\n");
    let _ = writeln!(scl, "NumRows : {}\n", region.rows.len());
    for r in &region.rows {
        let sites = ((r.x_hi - r.x_lo) / r.site_width).round();
        let _ = writeln!(scl, "CoreRow Horizontal");
        let _ = writeln!(scl, "  Coordinate    :   {}", r.y);
        let _ = writeln!(scl, "  Height        :   {}", r.height);
        let _ = writeln!(scl, "  Sitewidth     :   {}", r.site_width);
        let _ = writeln!(scl, "  Sitespacing   :   {}", r.site_width);
        let _ = writeln!(scl, "  Siteorient    :   1");
        let _ = writeln!(scl, "  Sitesymmetry  :   1");
        let _ = writeln!(
            scl,
            "  SubrowOrigin  :   {}\tNumSites  :  {}",
            r.x_lo, sites
        );
        let _ = writeln!(scl, "End");
    }

    let file = |ext: &str| dir.join(format!("{name}.{ext}"));
    write_file(&file("nodes"), &nodes)?;
    write_file(&file("nets"), &nets)?;
    write_file(&file("wts"), &wts)?;
    write_file(&file("scl"), &scl)?;
    write_pl(placement, netlist, file("pl"))?;
    let aux = file("aux");
    write_file(
        &aux,
        &format!("RowBasedPlacement : {name}.nodes {name}.nets {name}.wts {name}.pl {name}.scl\n"),
    )?;
    Ok(aux)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) {
        fs::write(dir.join(name), text).unwrap();
    }

    fn tiny(dir: &Path) -> PathBuf {
        write(
            dir,
            "t.aux",
            "RowBasedPlacement : t.nodes t.nets t.wts t.pl t.scl\n",
        );
        write(
            dir,
            "t.nodes",
            "UCLA nodes 1.0\n# comment\n\nNumNodes : 3\nNumTerminals : 1\n\
             a 2 12\nb 4 12\no1 10 10 terminal\n",
        );
        write(
            dir,
            "t.nets",
            "UCLA nets 1.0\nNumNets : 2\nNumPins : 4\n\
             NetDegree : 2 n0\n a I : 0.5 -1\n b O : -1 2\n\
             NetDegree : 2 n1\n b I\n o1 O : 0 0\n",
        );
        write(dir, "t.wts", "UCLA wts 1.0\n");
        write(
            dir,
            "t.pl",
            "UCLA pl 1.0\n\na 0 0 : N\nb 10 12 : N\no1 100 200 : N /FIXED\n",
        );
        write(
            dir,
            "t.scl",
            "UCLA scl 1.0\nNumRows : 2\n\
             CoreRow Horizontal\n Coordinate : 0\n Height : 12\n Sitewidth : 1\n Sitespacing : 1\n\
             Siteorient : 1\n Sitesymmetry : 1\n SubrowOrigin : 0 NumSites : 50\nEnd\n\
             CoreRow Horizontal\n Coordinate : 12\n Height : 12\n Sitewidth : 1\n Sitespacing : 1\n\
             Siteorient : 1\n Sitesymmetry : 1\n SubrowOrigin : 0 NumSites : 50\nEnd\n",
        );
        dir.join("t.aux")
    }

    #[test]
    fn parses_tiny_benchmark() {
        let dir = tempfile::tempdir().unwrap();
        let d = parse_bookshelf(tiny(dir.path())).unwrap();
        assert_eq!(d.netlist.num_movable(), 2);
        assert_eq!(d.netlist.fixed().len(), 1);
        let o1 = d.netlist.node_by_name("o1").unwrap();
        assert_eq!(o1.kind, NodeKind::Fixed);
        assert_eq!(o1.center, (105.0, 205.0));
        let b = d.netlist.node_by_name("b").unwrap();
        assert_eq!(d.placement.x[b.id], 12.0);
        assert_eq!(d.placement.y[b.id], 18.0);
        assert_eq!(d.netlist.pins.len(), 4);
        assert_eq!(d.netlist.pins[0].offset, (0.5, -1.0));
        assert_eq!(d.region.rows.len(), 2);
        assert_eq!(d.region.bbox.x_hi, 50.0);
        d.netlist.validate().unwrap();
    }

    #[test]
    fn missing_file_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let aux = tiny(dir.path());
        fs::remove_file(dir.path().join("t.scl")).unwrap();
        assert!(matches!(
            parse_bookshelf(aux),
            Err(PlaceError::MissingFile { .. })
        ));
    }

    #[test]
    fn bad_header_carries_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let aux = tiny(dir.path());
        write(dir.path(), "t.nodes", "# c\nUCLA nets 1.0\n");
        match parse_bookshelf(aux) {
            Err(PlaceError::BadHeader { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_pin_node_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let aux = tiny(dir.path());
        write(
            dir.path(),
            "t.nets",
            "UCLA nets 1.0\nNumNets : 1\nNumPins : 2\nNetDegree : 2\n a I\n zz O\n",
        );
        match parse_bookshelf(aux) {
            Err(PlaceError::UnknownNode { line, name, .. }) => {
                assert_eq!(line, 6);
                assert_eq!(name, "zz");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn declared_counts_are_checked() {
        let dir = tempfile::tempdir().unwrap();
        let aux = tiny(dir.path());
        write(
            dir.path(),
            "t.nodes",
            "UCLA nodes 1.0\nNumNodes : 4\nNumTerminals : 1\na 2 12\nb 4 12\no1 10 10 terminal\n",
        );
        assert!(matches!(
            parse_bookshelf(&aux),
            Err(PlaceError::CountMismatch {
                what: "NumNodes",
                line: 2,
                ..
            })
        ));

        let dir = tempfile::tempdir().unwrap();
        let aux = tiny(dir.path());
        write(
            dir.path(),
            "t.nets",
            "UCLA nets 1.0\nNumNets : 1\nNumPins : 3\nNetDegree : 3 n0\n a I\n b O\n",
        );
        assert!(matches!(
            parse_bookshelf(&aux),
            Err(PlaceError::CountMismatch {
                what: "NetDegree",
                line: 4,
                declared: 3,
                found: 2,
                ..
            })
        ));
    }

    #[test]
    fn write_pl_converts_centers_to_corners() {
        let dir = tempfile::tempdir().unwrap();
        let node = Node {
            id: 0,
            name: "c".into(),
            kind: NodeKind::Movable,
            width: 2.0,
            height: 2.0,
            center: (0.0, 0.0),
            charge: 4.0,
            non_image: false,
        };
        let nl = Netlist::new(vec![node], vec![]).unwrap();
        let p = PlacementState {
            x: vec![5.0, 99.0],
            y: vec![5.0, 99.0],
        };
        let path = dir.path().join("o.pl");
        write_pl(&p, &nl, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.contains("c\t4\t4\t: N\n"), "{text}");
        assert!(!text.contains("99"));
    }

    #[test]
    fn write_pl_with_no_movables_lists_fixed_only() {
        let dir = tempfile::tempdir().unwrap();
        let node = Node {
            id: 0,
            name: "pad".into(),
            kind: NodeKind::Fixed,
            width: 2.0,
            height: 4.0,
            center: (1.0, 2.0),
            charge: 8.0,
            non_image: false,
        };
        let nl = Netlist::new(vec![node], vec![]).unwrap();
        let path = dir.path().join("o.pl");
        write_pl(&PlacementState::default(), &nl, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let body: Vec<&str> = text.lines().skip(2).collect();
        assert_eq!(body, vec!["pad\t0\t0\t: N /FIXED"]);
    }

    #[test]
    fn round_trip_preserves_everything() {
        let dir = tempfile::tempdir().unwrap();
        let d = parse_bookshelf(tiny(dir.path())).unwrap();
        let out = tempfile::tempdir().unwrap();
        let aux = write_bookshelf(out.path(), "rt", &d.netlist, &d.region, &d.placement).unwrap();
        let e = parse_bookshelf(aux).unwrap();
        assert_eq!(e.placement, d.placement);
        assert_eq!(e.netlist.nodes, d.netlist.nodes);
        assert_eq!(e.netlist.pins, d.netlist.pins);
        assert_eq!(e.region, d.region);
    }
}

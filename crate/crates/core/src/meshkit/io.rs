//! Triangle-style ASCII mesh files.
//!
//! `.node`: header `count 2 0 1`, then `index x y marker` per vertex.
//! `.ele`: header `count 3 0`, then `index v1 v2 v3`. Indices are 1-based on
//! output; on input the base is taken from the first record. `#` starts a
//! comment.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{orient, Mesh, Point2};
use crate::error::{Error, Result};

pub fn write_node(mesh: &Mesh) -> String {
    let mut on_boundary = vec![false; mesh.num_vertices()];
    for e in mesh.boundary_edges() {
        on_boundary[e.a] = true;
        on_boundary[e.b] = true;
    }
    let mut out = format!("{} 2 0 1\n", mesh.num_vertices());
    for (i, p) in mesh.vertices().iter().enumerate() {
        let _ = writeln!(out, "{} {} {} {}", i + 1, p.x, p.y, on_boundary[i] as i32);
    }
    out
}

pub fn write_ele(mesh: &Mesh) -> String {
    let mut out = format!("{} 3 0\n", mesh.num_triangles());
    for (i, t) in mesh.triangles().iter().enumerate() {
        let _ = writeln!(out, "{} {} {} {}", i + 1, t[0] + 1, t[1] + 1, t[2] + 1);
    }
    out
}

fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(n, line)| {
        let body = line.split('#').next().unwrap_or("");
        let fields: Vec<&str> = body.split_whitespace().collect();
        (!fields.is_empty()).then_some((n + 1, fields))
    })
}

fn field<T: std::str::FromStr>(fields: &[&str], i: usize, line: usize) -> Result<T> {
    fields
        .get(i)
        .ok_or_else(|| Error::Parse(format!("line {line}: missing field {}", i + 1)))?
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: bad field '{}'", fields[i])))
}

/// Parses a `.node` file into vertices and their boundary markers.
pub fn read_node(text: &str) -> Result<(Vec<Point2>, Vec<i32>)> {
    let mut rec = records(text);
    let (line, header) = rec
        .next()
        .ok_or_else(|| Error::Parse("empty .node file".into()))?;
    let count: usize = field(&header, 0, line)?;
    let dim: usize = field(&header, 1, line)?;
    if dim != 2 {
        return Err(Error::Parse(format!("line {line}: dimension {dim} is not 2")));
    }
    let n_attr: usize = header.get(2).map_or(Ok(0), |_| field(&header, 2, line))?;
    let has_marker = header.get(3).map_or(Ok(0), |_| field::<usize>(&header, 3, line))? > 0;

    let mut base = None;
    let mut vertices = Vec::with_capacity(count);
    let mut markers = Vec::with_capacity(count);
    for (line, f) in rec.take(count) {
        let idx: usize = field(&f, 0, line)?;
        let base = *base.get_or_insert(idx);
        if idx != base + vertices.len() {
            return Err(Error::Parse(format!("line {line}: vertex index {idx} out of sequence")));
        }
        vertices.push(Point2::new(field(&f, 1, line)?, field(&f, 2, line)?));
        markers.push(if has_marker { field(&f, 3 + n_attr, line)? } else { 0 });
    }
    if vertices.len() != count {
        return Err(Error::Parse(format!(".node declares {count} vertices, found {}", vertices.len())));
    }
    Ok((vertices, markers))
}

/// Parses a `.ele` file into zero-based triangles. The index base is
/// inferred from `node_base`, the first vertex index of the matching `.node`.
pub fn read_ele(text: &str, node_base: usize) -> Result<Vec<[usize; 3]>> {
    let mut rec = records(text);
    let (line, header) = rec
        .next()
        .ok_or_else(|| Error::Parse("empty .ele file".into()))?;
    let count: usize = field(&header, 0, line)?;
    let per: usize = field(&header, 1, line)?;
    if per != 3 {
        return Err(Error::Parse(format!("line {line}: {per}-node elements are not supported")));
    }
    let mut triangles = Vec::with_capacity(count);
    for (line, f) in rec.take(count) {
        let mut tri = [0usize; 3];
        for (k, slot) in tri.iter_mut().enumerate() {
            let v: usize = field(&f, 1 + k, line)?;
            *slot = v
                .checked_sub(node_base)
                .ok_or_else(|| Error::Parse(format!("line {line}: vertex index {v} below base")))?;
        }
        triangles.push(tri);
    }
    if triangles.len() != count {
        return Err(Error::Parse(format!(".ele declares {count} triangles, found {}", triangles.len())));
    }
    Ok(triangles)
}

/// Builds a mesh from `.node`/`.ele` contents, flipping clockwise triangles.
pub fn parse_triangle(node: &str, ele: &str) -> Result<Mesh> {
    let (vertices, markers) = read_node(node)?;
    let base = records(node)
        .nth(1)
        .and_then(|(_, f)| f.first().and_then(|s| s.parse().ok()))
        .unwrap_or(1);
    let mut triangles = read_ele(ele, base)?;
    for tri in &mut triangles {
        if tri.iter().any(|&v| v >= vertices.len()) {
            return Err(Error::Parse(format!("triangle {tri:?} references a missing vertex")));
        }
        let [a, b, c] = tri.map(|v| vertices[v]);
        if orient(a, b, c) < 0.0 {
            tri.swap(1, 2);
        }
    }
    Mesh::with_markers(vertices, triangles, |a, b| markers[a].max(markers[b]).max(1))
}

fn with_ext(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Writes `<stem>.node` and `<stem>.ele`.
pub fn save(mesh: &Mesh, stem: &Path) -> Result<(PathBuf, PathBuf)> {
    let node = with_ext(stem, "node");
    let ele = with_ext(stem, "ele");
    fs::write(&node, write_node(mesh))?;
    fs::write(&ele, write_ele(mesh))?;
    Ok((node, ele))
}

/// Loads `<stem>.node` and `<stem>.ele`. A trailing `.node` or `.ele` on
/// `path` is stripped first.
pub fn load(path: &Path) -> Result<Mesh> {
    let stem = match path.extension().and_then(|e| e.to_str()) {
        Some("node") | Some("ele") => path.with_extension(""),
        _ => path.to_path_buf(),
    };
    let node = fs::read_to_string(with_ext(&stem, "node"))?;
    let ele = fs::read_to_string(with_ext(&stem, "ele"))?;
    parse_triangle(&node, &ele)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshkit::{gen_disk, gen_square, Rectangle};

    #[test]
    fn square_res2_files() {
        let mesh = gen_square(2, Rectangle::UNIT).unwrap();
        let node = write_node(&mesh);
        let ele = write_ele(&mesh);
        assert!(node.starts_with("9 2 0 1\n"));
        assert!(ele.starts_with("8 3 0\n"));
        assert_eq!(node.lines().count(), 10);
        // the center vertex is the only interior one
        assert!(node.contains("\n5 0.5 0.5 0\n"));
        let back = parse_triangle(&node, &ele).unwrap();
        assert_eq!(back.vertices(), mesh.vertices());
        assert_eq!(back.triangles(), mesh.triangles());
        assert_eq!(back.boundary_edges().len(), mesh.boundary_edges().len());
    }

    #[test]
    fn zero_based_and_clockwise_input() {
        let node = "# comment\n3 2 0 0\n0 0.0 0.0\n1 0.0 1.0\n2 1.0 0.0\n";
        let ele = "1 3 0\n0 0 1 2 # clockwise\n";
        let mesh = parse_triangle(node, ele).unwrap();
        assert!(mesh.area(0) > 0.0);
        assert_eq!(mesh.triangles()[0], [0, 2, 1]);
    }

    #[test]
    fn malformed_input_reported() {
        assert!(matches!(parse_triangle("", "1 3 0\n1 1 2 3\n"), Err(Error::Parse(_))));
        let node = "3 2 0 0\n1 0 0\n2 1 0\n";
        assert!(matches!(read_node(node), Err(Error::Parse(_))));
        let node = "3 2 0 0\n1 0 0\n2 1 0\n3 0 x\n";
        assert!(matches!(read_node(node), Err(Error::Parse(_))));
        let node = "3 2 0 0\n1 0 0\n2 1 0\n3 0 1\n";
        assert!(parse_triangle(node, "1 3 0\n1 1 2 9\n").is_err());
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let mesh = gen_disk(3, 1.0, Point2::ORIGIN).unwrap();
        let stem = dir.path().join("disk");
        let (node, _) = save(&mesh, &stem).unwrap();
        let back = load(&node).unwrap();
        assert_eq!(back.vertices(), mesh.vertices());
        assert_eq!(back.triangles(), mesh.triangles());
    }
}

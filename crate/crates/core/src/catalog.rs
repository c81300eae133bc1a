//! Artifact ingestion: format classification, metadata parsing, name matching
//! and the four archival indexes (artist, style, location, time).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Extensions accepted for artifacts, lowercase, with the class they map to.
pub const SUPPORTED_FORMATS: &[(&str, ArtifactKind)] = &[
    ("txt", ArtifactKind::Text),
    ("jpeg", ArtifactKind::Painting),
    ("jpg", ArtifactKind::Painting),
    ("png", ArtifactKind::Painting),
    ("obj", ArtifactKind::Sculpture),
    ("fbx", ArtifactKind::Sculpture),
    ("mp3", ArtifactKind::Sound),
    ("mp4", ArtifactKind::Video),
];

/// The metadata columns, in canonical order.
pub const COLUMNS: [&str; 7] = [
    "name",
    "artist",
    "style",
    "location",
    "time",
    "size",
    "description",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtifactKind {
    Painting,
    Sculpture,
    Video,
    Sound,
    Text,
}

impl ArtifactKind {
    pub const ALL: [ArtifactKind; 5] = [
        ArtifactKind::Painting,
        ArtifactKind::Sculpture,
        ArtifactKind::Video,
        ArtifactKind::Sound,
        ArtifactKind::Text,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ArtifactKind::Painting => "painting",
            ArtifactKind::Sculpture => "sculpture",
            ArtifactKind::Video => "video",
            ArtifactKind::Sound => "sound",
            ArtifactKind::Text => "text",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("unsupported format {0:?} (supported: {list})", list = supported_list())]
    UnsupportedFormat(String),
    #[error("malformed document at {location}: {reason}")]
    MalformedDocument { location: String, reason: String },
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("bad size syntax {0:?}, expected <w>x<h> or <w>x<h>x<d> in meters")]
    BadSizeSyntax(String),
    #[error("duplicate artifact name {0:?}")]
    DuplicateName(String),
    #[error("catalog is empty")]
    EmptyCatalog,
}

fn supported_list() -> String {
    SUPPORTED_FORMATS
        .iter()
        .map(|(ext, _)| format!(".{ext}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Physical extent in meters. Depth is optional (flat works).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Size {
    pub width_m: f64,
    pub height_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth_m: Option<f64>,
}

impl Size {
    /// Parses `<float>x<float>` or `<float>x<float>x<float>`; `.` is the only
    /// decimal separator and every component must be positive.
    pub fn parse(text: &str) -> Result<Size, CatalogError> {
        let bad = || CatalogError::BadSizeSyntax(text.to_string());
        let parts: Vec<&str> = text.trim().split('x').collect();
        if parts.len() != 2 && parts.len() != 3 {
            return Err(bad());
        }
        let mut values = Vec::with_capacity(3);
        for part in parts {
            values.push(parse_meters(part).ok_or_else(bad)?);
        }
        Ok(Size {
            width_m: values[0],
            height_m: values[1],
            depth_m: values.get(2).copied(),
        })
    }

    pub fn is_valid(&self) -> bool {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        ok(self.width_m) && ok(self.height_m) && self.depth_m.is_none_or(ok)
    }
}

impl fmt::Display for Size {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width_m, self.height_m)?;
        if let Some(d) = self.depth_m {
            write!(f, "x{d}")?;
        }
        Ok(())
    }
}

fn parse_meters(s: &str) -> Option<f64> {
    let digits = s.bytes().filter(u8::is_ascii_digit).count();
    let dots = s.bytes().filter(|b| *b == b'.').count();
    if digits == 0 || dots > 1 || digits + dots != s.len() {
        return None;
    }
    let v: f64 = s.parse().ok()?;
    (v.is_finite() && v > 0.0).then_some(v)
}

/// Extension of an asset reference, lowercase, without the dot. Query strings
/// and fragments of URIs are ignored.
fn extension_of(asset_ref: &str) -> Option<String> {
    let file = file_name(asset_ref);
    let (stem, ext) = file.rsplit_once('.')?;
    if stem.is_empty() || ext.is_empty() {
        return None;
    }
    Some(ext.to_ascii_lowercase())
}

fn file_name(asset_ref: &str) -> &str {
    let end = asset_ref.find(['?', '#']).unwrap_or(asset_ref.len());
    let path = &asset_ref[..end];
    path.rsplit(['/', '\\']).next().unwrap_or(path)
}

/// File name without its final extension; the key used for name matching.
pub fn asset_stem(asset_ref: &str) -> &str {
    let file = file_name(asset_ref);
    match file.rsplit_once('.') {
        Some((stem, _)) if !stem.is_empty() => stem,
        _ => file,
    }
}

pub fn classify_asset(asset_ref: &str) -> Result<ArtifactKind, CatalogError> {
    let ext = extension_of(asset_ref).ok_or_else(|| CatalogError::UnsupportedFormat(String::new()))?;
    SUPPORTED_FORMATS
        .iter()
        .find(|(known, _)| *known == ext)
        .map(|(_, kind)| *kind)
        .ok_or(CatalogError::UnsupportedFormat(format!(".{ext}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetadataFormat {
    Csv,
    Json,
}

impl MetadataFormat {
    /// Guesses the format from a file name. The `.css` spelling is accepted
    /// as an alias for CSV.
    pub fn from_path(path: &str) -> Option<Self> {
        match extension_of(path)?.as_str() {
            "csv" | "css" => Some(MetadataFormat::Csv),
            "json" => Some(MetadataFormat::Json),
            _ => None,
        }
    }
}

/// A parsed metadata row. Optional fields that were empty or missing are
/// `None`, never defaulted.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RecordFragment {
    pub name: String,
    pub artist: Option<String>,
    pub style: Option<String>,
    pub location: Option<String>,
    pub time: Option<i64>,
    pub size: Option<Size>,
    pub description: Option<String>,
}

impl RecordFragment {
    fn set(&mut self, column: &str, raw: Option<&str>, location: &str) -> Result<(), CatalogError> {
        let text = raw.map(str::trim).filter(|s| !s.is_empty()).map(str::to_string);
        match column {
            "name" => self.name = text.unwrap_or_default(),
            "artist" => self.artist = text,
            "style" => self.style = text,
            "location" => self.location = text,
            "description" => self.description = text,
            "time" => {
                self.time = match text {
                    None => None,
                    Some(t) => Some(t.parse().map_err(|_| CatalogError::MalformedDocument {
                        location: location.to_string(),
                        reason: format!("time {t:?} is not an integer year"),
                    })?),
                }
            }
            "size" => self.size = text.as_deref().map(Size::parse).transpose()?,
            other => return Err(CatalogError::UnknownColumn(other.to_string())),
        }
        Ok(())
    }

    fn check_name(&self, location: &str) -> Result<(), CatalogError> {
        if self.name.is_empty() {
            return Err(CatalogError::MalformedDocument {
                location: location.to_string(),
                reason: "missing name".into(),
            });
        }
        Ok(())
    }
}

pub fn parse_metadata(document: &str, format: MetadataFormat) -> Result<Vec<RecordFragment>, CatalogError> {
    match format {
        MetadataFormat::Csv => parse_csv(document),
        MetadataFormat::Json => parse_json(document),
    }
}

fn parse_csv(document: &str) -> Result<Vec<RecordFragment>, CatalogError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::Headers)
        .from_reader(document.as_bytes());
    let malformed = |err: csv::Error| {
        let location = err
            .position()
            .map(|p| format!("line {}", p.line()))
            .unwrap_or_else(|| "unknown position".into());
        CatalogError::MalformedDocument { location, reason: err.to_string() }
    };

    let headers: Vec<String> = reader.headers().map_err(malformed)?.iter().map(str::to_string).collect();
    for (i, h) in headers.iter().enumerate() {
        if !COLUMNS.contains(&h.as_str()) {
            return Err(CatalogError::UnknownColumn(h.clone()));
        }
        if headers[..i].contains(h) {
            return Err(CatalogError::MalformedDocument {
                location: "line 1".into(),
                reason: format!("column {h:?} repeated"),
            });
        }
    }
    if !headers.iter().any(|h| h == "name") {
        return Err(CatalogError::MalformedDocument {
            location: "line 1".into(),
            reason: "header has no name column".into(),
        });
    }

    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(malformed)?;
        let location = format!("line {}", row.position().map_or(0, |p| p.line()));
        let mut fragment = RecordFragment::default();
        for (column, value) in headers.iter().zip(row.iter()) {
            fragment.set(column, Some(value), &location)?;
        }
        fragment.check_name(&location)?;
        out.push(fragment);
    }
    Ok(out)
}

fn parse_json(document: &str) -> Result<Vec<RecordFragment>, CatalogError> {
    use serde_json::Value;

    let value: Value = serde_json::from_str(document).map_err(|e| CatalogError::MalformedDocument {
        location: format!("line {} column {}", e.line(), e.column()),
        reason: e.to_string(),
    })?;
    let Value::Array(items) = value else {
        return Err(CatalogError::MalformedDocument {
            location: "/".into(),
            reason: "expected an array of objects".into(),
        });
    };

    let mut out = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let location = format!("/{i}");
        let Value::Object(map) = item else {
            return Err(CatalogError::MalformedDocument { location, reason: "expected an object".into() });
        };
        let mut fragment = RecordFragment::default();
        for (key, value) in map {
            if !COLUMNS.contains(&key.as_str()) {
                return Err(CatalogError::UnknownColumn(key.clone()));
            }
            let field_location = format!("{location}/{key}");
            let text = match value {
                Value::Null => None,
                Value::String(s) => Some(s.clone()),
                Value::Number(n) if key == "time" => match n.as_i64() {
                    Some(year) => Some(year.to_string()),
                    None => {
                        return Err(CatalogError::MalformedDocument {
                            location: field_location,
                            reason: format!("time {n} is not an integer year"),
                        })
                    }
                },
                other => {
                    return Err(CatalogError::MalformedDocument {
                        location: field_location,
                        reason: format!("unexpected value {other}"),
                    })
                }
            };
            fragment.set(key, text.as_deref(), &field_location)?;
        }
        fragment.check_name(&location)?;
        out.push(fragment);
    }
    Ok(out)
}

/// Index into [`Catalog::records`].
pub type RecordId = usize;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactRecord {
    pub name: String,
    #[serde(default)]
    pub artist: String,
    #[serde(default)]
    pub style: String,
    #[serde(default)]
    pub location: String,
    #[serde(default)]
    pub time: Option<i64>,
    #[serde(default)]
    pub size: Option<Size>,
    #[serde(default)]
    pub description: String,
    pub kind: ArtifactKind,
    pub asset_ref: String,
}

impl ArtifactRecord {
    /// A record for an asset that had no metadata row.
    pub fn bare(asset_ref: &str) -> Result<Self, CatalogError> {
        Ok(ArtifactRecord {
            name: asset_stem(asset_ref).to_string(),
            artist: String::new(),
            style: String::new(),
            location: String::new(),
            time: None,
            size: None,
            description: String::new(),
            kind: classify_asset(asset_ref)?,
            asset_ref: asset_ref.to_string(),
        })
    }

    fn with_fragment(asset_ref: &str, kind: ArtifactKind, f: RecordFragment) -> Self {
        ArtifactRecord {
            name: f.name,
            artist: f.artist.unwrap_or_default(),
            style: f.style.unwrap_or_default(),
            location: f.location.unwrap_or_default(),
            time: f.time,
            size: f.size,
            description: f.description.unwrap_or_default(),
            kind,
            asset_ref: asset_ref.to_string(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.name.is_empty() {
            return Err("empty name".into());
        }
        if let Some(size) = &self.size {
            if !size.is_valid() {
                return Err(format!("{}: size components must be positive", self.name));
            }
        }
        match classify_asset(&self.asset_ref) {
            Ok(kind) if kind == self.kind => Ok(()),
            Ok(kind) => Err(format!(
                "{}: kind {} does not match asset {} ({})",
                self.name,
                self.kind.as_str(),
                self.asset_ref,
                kind.as_str()
            )),
            Err(e) => Err(format!("{}: {e}", self.name)),
        }
    }

    pub fn key(&self, key: GroupKeyKind) -> GroupKey {
        let text = |s: &str| {
            if s.is_empty() {
                GroupKey::Unspecified
            } else {
                GroupKey::Text(s.to_string())
            }
        };
        match key {
            GroupKeyKind::Artist => text(&self.artist),
            GroupKeyKind::Style => text(&self.style),
            GroupKeyKind::Location => text(&self.location),
            GroupKeyKind::Time => self.time.map_or(GroupKey::Unspecified, GroupKey::Year),
        }
    }
}

/// Exhibition order: dated records by year, then undated records, with the
/// name breaking every tie.
pub fn exhibition_order(a: &ArtifactRecord, b: &ArtifactRecord) -> std::cmp::Ordering {
    (a.time.is_none(), a.time, &a.name).cmp(&(b.time.is_none(), b.time, &b.name))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKeyKind {
    Artist,
    Style,
    Location,
    Time,
}

impl GroupKeyKind {
    pub const ALL: [GroupKeyKind; 4] = [
        GroupKeyKind::Artist,
        GroupKeyKind::Style,
        GroupKeyKind::Location,
        GroupKeyKind::Time,
    ];

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "artist" => Some(GroupKeyKind::Artist),
            "style" => Some(GroupKeyKind::Style),
            "location" => Some(GroupKeyKind::Location),
            "time" => Some(GroupKeyKind::Time),
            _ => None,
        }
    }
}

/// A value of one archival index. `Unspecified` sorts after every real key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKey {
    Text(String),
    Year(i64),
    Unspecified,
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKey::Text(s) => f.write_str(s),
            GroupKey::Year(y) => write!(f, "{y}"),
            GroupKey::Unspecified => f.write_str("unspecified"),
        }
    }
}

pub type Index = BTreeMap<GroupKey, Vec<RecordId>>;

#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    records: Vec<ArtifactRecord>,
    index_artist: Index,
    index_style: Index,
    index_location: Index,
    index_time: Index,
}

impl Catalog {
    pub fn from_records(records: Vec<ArtifactRecord>) -> Result<Self, CatalogError> {
        let mut seen = HashMap::new();
        for (i, r) in records.iter().enumerate() {
            r.validate().map_err(|reason| CatalogError::MalformedDocument {
                location: format!("record {i}"),
                reason,
            })?;
            if seen.insert(r.name.clone(), i).is_some() {
                return Err(CatalogError::DuplicateName(r.name.clone()));
            }
        }
        let mut catalog = Catalog {
            records,
            index_artist: Index::new(),
            index_style: Index::new(),
            index_location: Index::new(),
            index_time: Index::new(),
        };
        catalog.rebuild_indexes();
        Ok(catalog)
    }

    fn rebuild_indexes(&mut self) {
        for key in GroupKeyKind::ALL {
            let index = build_index(&self.records, key);
            *self.index_mut(key) = index;
        }
    }

    fn index_mut(&mut self, key: GroupKeyKind) -> &mut Index {
        match key {
            GroupKeyKind::Artist => &mut self.index_artist,
            GroupKeyKind::Style => &mut self.index_style,
            GroupKeyKind::Location => &mut self.index_location,
            GroupKeyKind::Time => &mut self.index_time,
        }
    }

    pub fn index(&self, key: GroupKeyKind) -> &Index {
        match key {
            GroupKeyKind::Artist => &self.index_artist,
            GroupKeyKind::Style => &self.index_style,
            GroupKeyKind::Location => &self.index_location,
            GroupKeyKind::Time => &self.index_time,
        }
    }

    /// True when every stored index equals one rebuilt from the records.
    pub fn indexes_consistent(&self) -> bool {
        GroupKeyKind::ALL
            .iter()
            .all(|k| *self.index(*k) == build_index(&self.records, *k))
    }

    pub fn records(&self) -> &[ArtifactRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&CatalogDocument { records: self.records.clone() })
            .expect("catalog serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CatalogError> {
        let doc: CatalogDocument = serde_json::from_str(text).map_err(|e| CatalogError::MalformedDocument {
            location: format!("line {} column {}", e.line(), e.column()),
            reason: e.to_string(),
        })?;
        Catalog::from_records(doc.records)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogDocument {
    records: Vec<ArtifactRecord>,
}

fn build_index(records: &[ArtifactRecord], key: GroupKeyKind) -> Index {
    let mut index = Index::new();
    for (id, r) in records.iter().enumerate() {
        index.entry(r.key(key)).or_default().push(id);
    }
    index
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogBuild {
    pub catalog: Catalog,
    /// Names of metadata rows that matched no asset.
    pub unmatched_fragments: Vec<String>,
}

/// Matches metadata rows to assets by file stem (exact, case-sensitive).
/// Records follow the order of `asset_refs`.
pub fn build_catalog(fragments: Vec<RecordFragment>, asset_refs: &[String]) -> Result<CatalogBuild, CatalogError> {
    let mut by_name: HashMap<String, RecordFragment> = HashMap::new();
    let mut fragment_order = Vec::new();
    for f in fragments {
        if by_name.contains_key(&f.name) {
            return Err(CatalogError::DuplicateName(f.name));
        }
        fragment_order.push(f.name.clone());
        by_name.insert(f.name.clone(), f);
    }

    let mut stems = HashMap::new();
    let mut records = Vec::with_capacity(asset_refs.len());
    for asset in asset_refs {
        let kind = classify_asset(asset)?;
        let stem = asset_stem(asset);
        if stems.insert(stem.to_string(), ()).is_some() {
            return Err(CatalogError::DuplicateName(stem.to_string()));
        }
        let record = match by_name.remove(stem) {
            Some(fragment) => ArtifactRecord::with_fragment(asset, kind, fragment),
            None => ArtifactRecord::bare(asset)?,
        };
        records.push(record);
    }

    let unmatched_fragments = fragment_order.into_iter().filter(|n| by_name.contains_key(n)).collect();
    Ok(CatalogBuild {
        catalog: Catalog::from_records(records)?,
        unmatched_fragments,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArtifactGroup {
    pub key_kind: GroupKeyKind,
    pub key: GroupKey,
    pub records: Vec<ArtifactRecord>,
}

impl ArtifactGroup {
    pub fn new(key_kind: GroupKeyKind, key: GroupKey, mut records: Vec<ArtifactRecord>) -> Self {
        records.sort_by(exhibition_order);
        ArtifactGroup { key_kind, key, records }
    }
}

/// Partitions the catalog by one archival index. Groups come out in key
/// order with the unspecified group (if any) last.
pub fn group_by(catalog: &Catalog, key: GroupKeyKind) -> Result<Vec<ArtifactGroup>, CatalogError> {
    if catalog.is_empty() {
        return Err(CatalogError::EmptyCatalog);
    }
    Ok(catalog
        .index(key)
        .iter()
        .map(|(value, ids)| {
            let records = ids.iter().map(|id| catalog.records[*id].clone()).collect();
            ArtifactGroup::new(key, value.clone(), records)
        })
        .collect())
}

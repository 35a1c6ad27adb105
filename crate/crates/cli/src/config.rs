//! Line-oriented `key = value` configuration with `[section]` headers.
//!
//! Blank lines and lines starting with `#` are skipped. Values keep
//! internal spaces and `=` signs (`model = subquad rho=1`), so nothing
//! needs quoting. The parser is strict on purpose: duplicate sections or
//! keys, keys before any section, and empty values are all errors, and
//! each command checks the parsed file against its declared schema so a
//! misspelled key fails loudly instead of silently falling back to a
//! default.

pub struct Config {
    entries: Vec<Entry>,
    sections: Vec<String>,
}

struct Entry {
    section: String,
    key: String,
    value: String,
    line: usize,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut entries: Vec<Entry> = Vec::new();
        let mut sections: Vec<String> = Vec::new();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let n = i + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(inner) = line.strip_prefix('[') {
                let name = inner
                    .strip_suffix(']')
                    .ok_or(format!("line {n}: unterminated section header `{line}`"))?
                    .trim();
                if name.is_empty() {
                    return Err(format!("line {n}: empty section name"));
                }
                if sections.iter().any(|s| s == name) {
                    return Err(format!("line {n}: duplicate section [{name}]"));
                }
                sections.push(name.to_string());
                current = Some(name.to_string());
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!(
                    "line {n}: expected `key = value` or `[section]`, got `{line}`"
                ));
            };
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() {
                return Err(format!("line {n}: empty key"));
            }
            if value.is_empty() {
                return Err(format!("line {n}: empty value for `{key}`"));
            }
            let Some(section) = current.clone() else {
                return Err(format!("line {n}: `{key}` appears before any [section]"));
            };
            if entries.iter().any(|e| e.section == section && e.key == key) {
                return Err(format!("line {n}: duplicate key `{key}` in [{section}]"));
            }
            entries.push(Entry { section, key: key.to_string(), value: value.to_string(), line: n });
        }
        Ok(Self { entries, sections })
    }

    /// Enforce a command schema: every required section present, every
    /// present section known, every key inside its section's allowed list.
    pub fn check_schema(
        &self,
        required: &[&str],
        allowed: &[(&str, &[&str])],
    ) -> Result<(), String> {
        for r in required {
            if !self.sections.iter().any(|s| s == r) {
                return Err(format!("missing required section [{r}]"));
            }
        }
        for s in &self.sections {
            let Some((_, keys)) = allowed.iter().find(|(name, _)| name == s) else {
                return Err(format!("unknown section [{s}] for this command"));
            };
            for e in self.entries.iter().filter(|e| &e.section == s) {
                if !keys.contains(&e.key.as_str()) {
                    return Err(format!(
                        "line {}: unknown key `{}` in [{}]; allowed: {}",
                        e.line,
                        e.key,
                        s,
                        keys.join(", ")
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.sections.iter().any(|s| s == section)
    }

    pub fn keys(&self, section: &str) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| e.section == section)
            .map(|e| e.key.as_str())
            .collect()
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|e| e.section == section && e.key == key)
            .map(|e| e.value.as_str())
    }

    pub fn req(&self, section: &str, key: &str) -> Result<&str, String> {
        self.get(section, key)
            .ok_or_else(|| format!("missing key `{key}` in [{section}]"))
    }

    pub fn f64(&self, section: &str, key: &str) -> Result<f64, String> {
        parse_f64(section, key, self.req(section, key)?)
    }

    pub fn f64_or(&self, section: &str, key: &str, default: f64) -> Result<f64, String> {
        match self.get(section, key) {
            Some(raw) => parse_f64(section, key, raw),
            None => Ok(default),
        }
    }

    pub fn usize(&self, section: &str, key: &str) -> Result<usize, String> {
        let raw = self.req(section, key)?;
        raw.parse()
            .map_err(|_| format!("`{section}.{key}`: expected a non-negative integer, got `{raw}`"))
    }

    pub fn usize_or(&self, section: &str, key: &str, default: usize) -> Result<usize, String> {
        match self.get(section, key) {
            Some(raw) => raw.parse().map_err(|_| {
                format!("`{section}.{key}`: expected a non-negative integer, got `{raw}`")
            }),
            None => Ok(default),
        }
    }

    pub fn bool_or(&self, section: &str, key: &str, default: bool) -> Result<bool, String> {
        match self.get(section, key) {
            Some("true") => Ok(true),
            Some("false") => Ok(false),
            Some(raw) => Err(format!("`{section}.{key}`: expected true or false, got `{raw}`")),
            None => Ok(default),
        }
    }

    pub fn str_or<'a>(&'a self, section: &str, key: &str, default: &'a str) -> &'a str {
        self.get(section, key).unwrap_or(default)
    }

    /// Comma-separated list of reals, e.g. `lambda_list = 4, 8, 16`.
    pub fn f64_list(&self, section: &str, key: &str) -> Result<Vec<f64>, String> {
        let raw = self.req(section, key)?;
        raw.split(',')
            .map(|tok| parse_f64(section, key, tok.trim()))
            .collect()
    }
}

fn parse_f64(section: &str, key: &str, raw: &str) -> Result<f64, String> {
    raw.parse()
        .map_err(|_| format!("`{section}.{key}`: expected a real number, got `{raw}`"))
}

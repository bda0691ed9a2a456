use std::collections::HashMap;

/// Flat `key = value` text with optional `[section]` headers. Keys are
/// case-insensitive and `_` is interchangeable with `-`. Lines starting
/// with `#` or `;` are comments. A section value shadows a top-level
/// value of the same key; command line flags beat both.
#[derive(Debug, Default)]
pub struct Config {
    top: HashMap<String, String>,
    sections: HashMap<String, HashMap<String, String>>,
}

fn canon(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('_', "-")
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut cfg = Config::default();
        let mut section: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                let name = canon(name);
                if name.is_empty() {
                    return Err(format!("config line {}: empty section name", idx + 1));
                }
                cfg.sections.entry(name.clone()).or_default();
                section = Some(name);
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!("config line {}: expected `key = value`", idx + 1));
            };
            let key = canon(key);
            if key.is_empty() {
                return Err(format!("config line {}: empty key", idx + 1));
            }
            let value = value.trim().to_string();
            match &section {
                Some(name) => {
                    cfg.sections.get_mut(name).expect("section exists").insert(key, value);
                }
                None => {
                    cfg.top.insert(key, value);
                }
            }
        }
        Ok(cfg)
    }

    /// Section value if present, top-level value otherwise.
    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        let key = canon(key);
        self.sections
            .get(&canon(section))
            .and_then(|s| s.get(&key))
            .or_else(|| self.top.get(&key))
            .map(String::as_str)
    }
}

//! Machine-readable run reports.
//!
//! Reports are deterministic for identical inputs except for the timing
//! field, which is always emitted last in text form. All numbers are
//! strings: exact rationals as `p/q`, enclosures as `[lo, hi]@bits`.

use serde::Serialize;

use cutpoints::separation::WitnessCertificate;

use crate::numbers::{enclosure_digits, enclosure_string, scalar_string};

#[derive(Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<(String, String)>,
    pub outputs: Vec<(String, String)>,
    pub timing_ms: u128,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Report {
        Report {
            command: command.into(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            timing_ms: 0,
        }
    }

    pub fn input(&mut self, key: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.inputs.push((key.into(), value.into()));
        self
    }

    pub fn output(&mut self, key: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.outputs.push((key.into(), value.into()));
        self
    }

    /// Append the standard fields of a witness certificate.
    pub fn witness_certificate(
        &mut self,
        cert: &WitnessCertificate,
        precision_bits: u32,
    ) -> Result<(), cutpoints::KernelError> {
        self.output("witness", cert.witness.to_string());
        for (i, side) in ["first", "second"].iter().enumerate() {
            self.output(
                format!("{side}-cutpoint"),
                scalar_string(cert.acceptors[i].cutpoint(), precision_bits)?,
            );
            self.output(
                format!("{side}-probability"),
                enclosure_string(&cert.enclosures[i], enclosure_digits(cert.precision_bits)),
            );
            self.output(
                format!("{side}-member"),
                if cert.verdicts[i] { "true" } else { "false" },
            );
        }
        self.output("certified-bits", cert.precision_bits.to_string());
        if let Some(scan) = &cert.scan {
            self.output(
                "bracket-crossing",
                scan.bracket_first_crossing.to_string(),
            );
            self.output("witness-length", scan.chosen.to_string());
        }
        if let Some(q) = &cert.quadrant {
            self.output("first-diff-digit", q.context.j.to_string());
            self.output("quadrant", q.quadrant.to_string());
            self.output("input-length", q.input_len.to_string());
        }
        self.output("derivation", cert.derivation.clone());
        Ok(())
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {}\n", self.command));
        for (k, v) in &self.inputs {
            out.push_str(&format!("{k}: {v}\n"));
        }
        for (k, v) in &self.outputs {
            out.push_str(&format!("{k}: {v}\n"));
        }
        out.push_str(&format!("timing-ms: {}\n", self.timing_ms));
        out
    }

    pub fn render_json(&self) -> String {
        let inputs: serde_json::Map<String, serde_json::Value> = self
            .inputs
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        let outputs: serde_json::Map<String, serde_json::Value> = self
            .outputs
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        let doc = serde_json::json!({
            "command": self.command,
            "inputs": inputs,
            "outputs": outputs,
            "timing_ms": self.timing_ms,
        });
        serde_json::to_string_pretty(&doc).expect("serializable")
    }
}

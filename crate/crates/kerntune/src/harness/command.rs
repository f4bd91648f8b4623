//! Backend that measures an external program.

use super::{Backend, DeviceSpec, HarnessError};
use crate::space::Config;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

/// Where the runtime of a command run comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuntimeSource {
    /// Wall-clock of the child process.
    WallClock,
    /// A `TIME_S=<float>` line on the child's standard output (the last one
    /// wins).
    TimeLine,
}

/// Runs a shell command template once per measurement. `{name}`
/// placeholders are substituted with the config's parameter values;
/// `{iters}`, `{device_name}` and `{device_gflops}` are also available.
#[derive(Debug, Clone)]
pub struct CommandBackend {
    template: String,
    timeout: Duration,
    source: RuntimeSource,
    param_names: Vec<String>,
    /// Value substituted for `{iters}`; lets command lines scale their
    /// iteration count per device.
    pub iters: u64,
}

impl CommandBackend {
    pub fn new(
        template: impl Into<String>,
        timeout: Duration,
        source: RuntimeSource,
        param_names: Vec<String>,
        iters: u64,
    ) -> Result<Self, HarnessError> {
        let template = template.into();
        for name in &param_names {
            if !template.contains(&format!("{{{name}}}")) {
                return Err(HarnessError::TemplateMissingParam(name.clone()));
            }
        }
        Ok(Self {
            template,
            timeout,
            source,
            param_names,
            iters,
        })
    }

    fn render(&self, config: &Config, device: &DeviceSpec) -> String {
        let mut cmd = self.template.clone();
        for (name, value) in self.param_names.iter().zip(config.values()) {
            cmd = cmd.replace(&format!("{{{name}}}"), &value.to_string());
        }
        cmd = cmd.replace("{iters}", &self.iters.to_string());
        cmd = cmd.replace("{device_name}", &device.name);
        cmd = cmd.replace("{device_gflops}", &device.gflops.to_string());
        cmd
    }
}

const POLL_INTERVAL: Duration = Duration::from_millis(10);

impl Backend for CommandBackend {
    fn kind(&self) -> &'static str {
        "command"
    }

    fn run(&self, config: &Config, device: &DeviceSpec) -> Result<f64, HarnessError> {
        let cmdline = self.render(config, device);
        let start = Instant::now();
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&cmdline)
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()?;

        let status = loop {
            if let Some(status) = child.try_wait()? {
                break status;
            }
            if start.elapsed() >= self.timeout {
                let _ = child.kill();
                let _ = child.wait();
                return Err(HarnessError::CommandTimeout {
                    seconds: self.timeout.as_secs_f64(),
                    command: cmdline,
                });
            }
            std::thread::sleep(POLL_INTERVAL);
        };
        let elapsed = start.elapsed().as_secs_f64();

        let mut stdout = String::new();
        let mut stderr = String::new();
        use std::io::Read;
        if let Some(mut s) = child.stdout.take() {
            let _ = s.read_to_string(&mut stdout);
        }
        if let Some(mut s) = child.stderr.take() {
            let _ = s.read_to_string(&mut stderr);
        }
        if !status.success() {
            return Err(HarnessError::CommandFailed {
                status: status.code().unwrap_or(-1),
                command: cmdline,
                stderr: stderr.trim().to_string(),
            });
        }
        match self.source {
            RuntimeSource::WallClock => Ok(elapsed),
            RuntimeSource::TimeLine => stdout
                .lines()
                .rev()
                .find_map(|l| l.trim().strip_prefix("TIME_S="))
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| HarnessError::UnparsableOutput {
                    command: cmdline,
                    output: stdout.trim().to_string(),
                }),
        }
    }
}

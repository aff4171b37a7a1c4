use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use microar_cli::client::{Client, DEFAULT_SERVER};
use microar_cli::error::io_error;
use microar_cli::render::render_scene;
use microar_cli::script::{apply_edits, compile_for, RemixOptions};
use microar_cli::CliError;
use microar_core::canonical;
use microar_core::catalog::Catalog;
use microar_core::package::{self, DecodedPackage, PackageError};
use microar_core::{validate_story, Aabb, Mode, Story, StoryId, Violation, PRESET_DIALOGS};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "microar",
    version,
    about = "Build, publish, remix and preview Micro AR stories"
)]
struct Cli {
    /// Repository service base URL.
    #[arg(long, global = true, env = "MICROAR_SERVER", default_value = DEFAULT_SERVER)]
    server: String,
    /// Local asset catalog directory; the built-in placeholder catalog is used when absent.
    #[arg(long, global = true, env = "MICROAR_CATALOG")]
    catalog: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a scene script into a package.
    Build {
        /// Scene script (YAML or JSON).
        script: PathBuf,
        /// Defaults to the script path with a .mar extension.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write a draft package (skips the publish checks).
        #[arg(long)]
        draft: bool,
    },
    /// Check a package or scene script against the publish rules.
    Validate {
        /// Scene script or package.
        path: PathBuf,
        /// Check the draft rules only.
        #[arg(long)]
        draft: bool,
    },
    /// Upload a package.
    Publish {
        package: PathBuf,
        /// Defaults to the package's creator.
        #[arg(long)]
        creator: Option<String>,
    },
    /// List published stories, newest first.
    Browse {
        #[arg(long, default_value_t = 1)]
        page: usize,
        #[arg(long)]
        page_size: Option<usize>,
        #[arg(long)]
        creator: Option<String>,
        /// Print the raw listing page.
        #[arg(long)]
        json: bool,
    },
    /// Download a published package.
    Fetch {
        /// Story id (64 hex digits).
        id: String,
        /// Defaults to <id>.mar.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Fetch a story, apply an edit script and write the remix package.
    Remix {
        /// Parent story id.
        id: String,
        /// Edit script (YAML or JSON).
        #[arg(long)]
        edits: PathBuf,
        /// Defaults to remix-<first 12 hex digits of the id>.mar.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Remix creator; overrides the edit script.
        #[arg(long)]
        creator: Option<String>,
        /// Unix seconds; overrides the edit script, defaults to now.
        #[arg(long)]
        created_at: Option<i64>,
        /// Publish the remix after writing it.
        #[arg(long)]
        publish: bool,
    },
    /// Show a story's ancestry, root first.
    Lineage { id: String },
    /// Print repository statistics.
    Stats,
    /// Draw a top-down SVG preview of one scene.
    Render {
        package: PathBuf,
        /// Zero-based scene index.
        scene_index: usize,
        /// SVG file to write.
        output: PathBuf,
    },
    /// Summarize a package.
    Inspect {
        package: PathBuf,
        /// Print the JSON document form instead.
        #[arg(long)]
        json: bool,
    },
    /// Manage the local asset catalog.
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
    /// List the preset dialog texts.
    Presets,
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// Create the catalog and seed it with the placeholder assets.
    Init,
    /// Keyword search over names and tags.
    Search {
        query: String,
        #[arg(long, default_value_t = 10)]
        limit: usize,
    },
    /// Store an asset blob.
    Add {
        blob: PathBuf,
        #[arg(long)]
        name: String,
        #[arg(long = "tag")]
        tags: Vec<String>,
        /// Local bounds in meters: min_x,min_y,min_z,max_x,max_y,max_z.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        bounds: Option<Vec<f64>>,
    },
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| io_error("cannot read", path, e))
}

fn read_text(path: &Path) -> Result<String> {
    let bytes = read(path)?;
    String::from_utf8(bytes)
        .map_err(|_| CliError::validation("encoding", format!("{} is not UTF-8", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| io_error("cannot write", path, e))
}

fn violations_error(code: &str, v: &[Violation]) -> CliError {
    let details: Vec<Value> = v
        .iter()
        .map(|x| json!({"path": x.path, "rule": x.rule.describe()}))
        .collect();
    let message = v
        .first()
        .map_or_else(|| "invalid story".to_owned(), ToString::to_string);
    CliError::validation(code, message).with_details(json!(details))
}

fn package_error(e: PackageError) -> CliError {
    match e {
        PackageError::Invalid(v) => violations_error("invalid_story", &v),
        other => CliError::validation(other.category(), other.to_string()),
    }
}

fn decode_file(path: &Path) -> Result<DecodedPackage> {
    package::decode_package(&read(path)?).map_err(package_error)
}

fn encode(story: &Story) -> Result<Vec<u8>> {
    package::encode(story).map_err(package_error)
}

fn parse_id(raw: &str) -> Result<StoryId> {
    raw.parse()
        .map_err(|_| CliError::validation("bad_id", format!("{raw:?} is not a story id")))
}

fn is_script(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("yaml" | "yml" | "json")
    )
}

fn open_catalog(dir: Option<&Path>) -> Result<Catalog> {
    match dir {
        Some(d) => Catalog::open(d).map_err(|e| CliError::io("catalog", e.to_string())),
        None => Ok(Catalog::builtin()),
    }
}

fn require_catalog_dir(dir: Option<&Path>) -> Result<&Path> {
    dir.ok_or_else(|| {
        CliError::validation(
            "usage",
            "this command needs --catalog DIR or MICROAR_CATALOG",
        )
    })
}

fn compile_file(path: &Path, catalog: &Catalog, mode: Mode) -> Result<Story> {
    let text = read_text(path)?;
    compile_for(&path.display().to_string(), &text, catalog, mode)
}

fn publish_check(story: &Story) -> Result<()> {
    let v = validate_story(story, Mode::Publish);
    if v.is_empty() {
        Ok(())
    } else {
        Err(violations_error("invalid_story", &v))
    }
}

/// Verifies downloaded bytes against the id they were requested under.
fn fetch_verified(client: &Client, id: &StoryId) -> Result<Vec<u8>> {
    let bytes = client.fetch(id)?;
    if StoryId::digest(&bytes) != *id {
        return Err(CliError::io(
            "integrity",
            format!("downloaded package does not hash to {id}"),
        ));
    }
    Ok(bytes)
}

fn publish(client: &Client, story: &Story, creator: Option<&str>) -> Result<StoryId> {
    let bytes = encode(story)?;
    let creator = creator.unwrap_or(&story.metadata.creator);
    let out = client.publish(bytes, creator)?;
    if out.created {
        println!("published {}", out.story_id);
    } else {
        println!("duplicate: {} was already published", out.story_id);
    }
    if let Some(diff) = out.body.get("diff").filter(|d| !d.is_null()) {
        println!(
            "diff {}",
            String::from_utf8_lossy(&canonical::value_to_vec(diff))
        );
    }
    Ok(out.story_id)
}

fn print_listing(l: &Value) {
    println!(
        "{}  {:>6} views  {:>2} scenes  {}  {}",
        l["story_id"].as_str().unwrap_or("?"),
        l["view_count"],
        l["scene_count"],
        l["creator"].as_str().unwrap_or("?"),
        l["title"].as_str().unwrap_or(""),
    );
}

fn summarize(story: &Story) {
    let md = &story.metadata;
    println!("title: {}", md.title);
    println!("creator: {}", md.creator);
    println!("original_creator: {}", md.original_creator);
    println!("created_at: {}", md.created_at);
    if let Some(p) = md.parent_story {
        println!("parent_story: {p}");
    }
    if let Some(h) = &md.placement_hints {
        println!("placement: {}", h.surface_class());
    }
    println!(
        "scenes: {}  objects: {}",
        story.scenes.len(),
        story.object_count()
    );
    for scene in &story.scenes {
        println!("scene {} {}", scene.index, scene.scene_id);
        for o in &scene.objects {
            let p = o.transform.position();
            let dialog = o
                .dialog
                .as_ref()
                .map(|d| format!("  \"{}\"", d.text()))
                .unwrap_or_default();
            println!(
                "  object {} {} at [{}, {}, {}]{dialog}",
                o.object_id,
                o.asset.display_name(),
                p[0],
                p[1],
                p[2]
            );
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let catalog_dir = cli.catalog.as_deref();
    let client = || Client::new(&cli.server);
    match cli.command {
        Command::Build {
            script,
            output,
            draft,
        } => {
            let catalog = open_catalog(catalog_dir)?;
            let story = compile_file(&script, &catalog, Mode::Draft)?;
            let out = output.unwrap_or_else(|| script.with_extension(package::FILE_EXTENSION));
            let bytes = if draft {
                package::encode_draft(&story).map_err(package_error)?
            } else {
                let bytes = encode(&story)?;
                println!("story {}", StoryId::digest(&bytes));
                bytes
            };
            write(&out, &bytes)?;
            println!("{}", out.display());
        }
        Command::Validate { path, draft } => {
            let (story, is_draft) = if is_script(&path) {
                {
                    let mode = if draft { Mode::Draft } else { Mode::Publish };
                    (
                        compile_file(&path, &open_catalog(catalog_dir)?, mode)?,
                        false,
                    )
                }
            } else {
                let d = decode_file(&path)?;
                (d.story, d.draft)
            };
            if !draft {
                if is_draft {
                    return Err(CliError::validation(
                        "draft",
                        "package is marked as a draft",
                    ));
                }
                publish_check(&story)?;
            }
            println!("valid ({} mode)", if draft { "draft" } else { "publish" });
            println!("{}", package::story_id(&story).map_err(package_error)?);
        }
        Command::Publish {
            package: path,
            creator,
        } => {
            let d = decode_file(&path)?;
            if d.draft {
                return Err(CliError::validation(
                    "draft",
                    "package is marked as a draft; rebuild it without --draft",
                ));
            }
            publish_check(&d.story)?;
            let id = publish(&client()?, &d.story, creator.as_deref())?;
            println!("{id}");
        }
        Command::Browse {
            page,
            page_size,
            creator,
            json,
        } => {
            let listing = client()?.list(page, page_size, creator.as_deref())?;
            if json {
                println!(
                    "{}",
                    String::from_utf8_lossy(&canonical::value_to_vec(&listing))
                );
            } else {
                for l in listing["stories"].as_array().into_iter().flatten() {
                    print_listing(l);
                }
                println!("page {} of {} stories", listing["page"], listing["total"]);
            }
        }
        Command::Fetch { id, output } => {
            let id = parse_id(&id)?;
            let bytes = fetch_verified(&client()?, &id)?;
            let out = output
                .unwrap_or_else(|| PathBuf::from(format!("{id}.{}", package::FILE_EXTENSION)));
            write(&out, &bytes)?;
            println!("{}", out.display());
        }
        Command::Remix {
            id,
            edits,
            output,
            creator,
            created_at,
            publish: also_publish,
        } => {
            let id = parse_id(&id)?;
            let client = client()?;
            let parent = package::decode(&fetch_verified(&client, &id)?).map_err(package_error)?;
            let catalog = open_catalog(catalog_dir)?;
            let text = read_text(&edits)?;
            let options = RemixOptions {
                creator,
                created_at,
            };
            let story = apply_edits(
                &parent,
                &edits.display().to_string(),
                &text,
                &catalog,
                &options,
            )?;
            let bytes = encode(&story)?;
            let out = output.unwrap_or_else(|| {
                let short: String = id.to_hex().chars().take(12).collect();
                PathBuf::from(format!("remix-{short}.{}", package::FILE_EXTENSION))
            });
            write(&out, &bytes)?;
            println!("story {}", StoryId::digest(&bytes));
            println!("{}", out.display());
            if also_publish {
                publish_check(&story)?;
                let new_id = publish(&client, &story, None)?;
                println!("{new_id}");
            }
        }
        Command::Lineage { id } => {
            let chain = client()?.lineage(&parse_id(&id)?)?;
            for l in chain.as_array().into_iter().flatten() {
                print_listing(l);
            }
        }
        Command::Stats => {
            let stats = client()?.stats()?;
            println!(
                "{}",
                String::from_utf8_lossy(&canonical::value_to_vec(&stats))
            );
        }
        Command::Render {
            package: path,
            scene_index,
            output,
        } => {
            let story = decode_file(&path)?.story;
            let catalog = open_catalog(catalog_dir)?;
            let svg = render_scene(&story, scene_index, &catalog)?;
            write(&output, svg.as_bytes())?;
            println!("{}", output.display());
        }
        Command::Inspect {
            package: path,
            json,
        } => {
            let d = decode_file(&path)?;
            if json {
                let mut doc = package::to_document(&d.story).map_err(package_error)?;
                doc["draft"] = json!(d.draft);
                println!(
                    "{}",
                    String::from_utf8_lossy(&canonical::value_to_vec(&doc))
                );
            } else {
                summarize(&d.story);
                println!("draft: {}", d.draft);
            }
            if d.draft {
                println!("{}", path.display());
            } else {
                println!("{}", package::story_id(&d.story).map_err(package_error)?);
            }
        }
        Command::Catalog { command } => match command {
            CatalogCommand::Init => {
                let dir = require_catalog_dir(catalog_dir)?;
                let catalog = open_catalog(Some(dir))?;
                let keys = catalog
                    .seed_builtin()
                    .map_err(|e| CliError::io("catalog", e.to_string()))?;
                println!("{} assets ({} built-in)", catalog.len(), keys.len());
                println!("{}", dir.display());
            }
            CatalogCommand::Search { query, limit } => {
                let catalog = open_catalog(catalog_dir)?;
                let hits = catalog
                    .search(&query, limit)
                    .map_err(|e| CliError::validation("bad_query", e.to_string()))?;
                if hits.is_empty() {
                    return Err(CliError::not_found(
                        "no_match",
                        format!("no asset matches query {query:?}"),
                    ));
                }
                for h in hits {
                    println!(
                        "{}  {}  [{}]",
                        h.asset_key,
                        h.display_name,
                        h.tags.join(", ")
                    );
                }
            }
            CatalogCommand::Add {
                blob,
                name,
                tags,
                bounds,
            } => {
                let dir = require_catalog_dir(catalog_dir)?;
                let catalog = open_catalog(Some(dir))?;
                if bounds.as_ref().is_some_and(|b| b.len() != 6) {
                    return Err(CliError::validation(
                        "usage",
                        "--bounds takes six comma-separated numbers",
                    ));
                }
                let bounds = bounds
                    .map(|b| Aabb::from_meters([b[0], b[1], b[2]], [b[3], b[4], b[5]]))
                    .transpose()
                    .map_err(|e| CliError::validation("invalid_field", e.to_string()))?;
                let key = catalog
                    .put_asset(&read(&blob)?, &name, &tags, bounds)
                    .map_err(|e| CliError::validation("bad_asset", e.to_string()))?;
                println!("{key}");
            }
        },
        Command::Presets => {
            for p in PRESET_DIALOGS {
                println!("{p}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind::{DisplayHelp, DisplayVersion};
            let _ = e.print();
            if matches!(e.kind(), DisplayHelp | DisplayVersion) {
                return ExitCode::SUCCESS;
            }
            let err = CliError::validation("usage", e.kind().to_string());
            eprintln!("{}", err.to_line());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("{}", e.to_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

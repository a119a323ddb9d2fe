import { ApiClient } from "./api.js";
import { findingsByField, resolveFindingAnchor } from "./paths.js";
import {
  ActivityForms,
  ConstraintEntry,
  StateStorage,
  WizardState,
  advance,
  back,
  buildDocument,
  clearState,
  effectiveEdges,
  ensureForms,
  initialState,
  loadState,
  moveActivity,
  saveState,
  stepProblems,
  syncEntries,
  toggleActivity,
} from "./state.js";
import type {
  ActivityEntry,
  ActivitySchema,
  Finding,
  MetricDefinition,
} from "./types.js";

const STEP_TITLES: Record<WizardState["step"], string> = {
  app_slos: "1 · Application SLOs",
  workflow_select: "2 · Workflow activities",
  activity_forms: "3 · Per-activity constraints",
  review: "4 · Review & store",
};

type El = HTMLElement;

export class Wizard {
  state: WizardState = initialState();
  appMetrics: MetricDefinition[] = [];
  activities: ActivityEntry[] = [];
  schemas: Record<string, ActivitySchema> = {};
  networkError: string | null = null;
  submitting = false;

  constructor(
    private api: ApiClient,
    private root: El,
    private storage: StateStorage | null = null,
  ) {}

  private get doc(): Document {
    return this.root.ownerDocument;
  }

  async start(): Promise<void> {
    if (this.storage) {
      const restored = loadState(this.storage);
      if (restored) this.state = restored;
    }
    await this.refreshCatalog();
    this.render();
  }

  /** Re-fetch catalog data; failures become a retry banner, never lost state. */
  async refreshCatalog(): Promise<void> {
    try {
      this.appMetrics = await this.api.applicationSlos();
      this.activities = await this.api.listActivities();
      this.state.appSlos = syncEntries(this.state.appSlos, this.appMetrics);
      for (const name of this.state.selected) {
        await this.loadSchema(name);
      }
      this.networkError = null;
    } catch (error) {
      this.networkError = `Could not reach the SLA service: ${String(error)}`;
    }
  }

  async loadSchema(name: string): Promise<void> {
    if (!this.schemas[name]) {
      this.schemas[name] = await this.api.activitySchema(name);
    }
    ensureForms(this.state, name, this.schemas[name]);
  }

  private persist(): void {
    if (this.storage) saveState(this.state, this.storage);
  }

  private update(mutate: () => void): void {
    mutate();
    this.persist();
    this.render();
  }

  // --- element helpers ---

  private el(
    tag: string,
    attrs: Record<string, string> = {},
    children: (El | string)[] = [],
  ): El {
    const node = this.doc.createElement(tag);
    for (const [key, value] of Object.entries(attrs)) {
      node.setAttribute(key, value);
    }
    for (const child of children) {
      node.append(typeof child === "string" ? this.doc.createTextNode(child) : child);
    }
    return node;
  }

  private textInput(
    field: string,
    value: string,
    onChange: (next: string) => void,
    placeholder = "",
  ): El {
    const input = this.el("input", {
      type: "text",
      value,
      placeholder,
      "data-field": field,
    }) as HTMLInputElement;
    input.value = value;
    input.addEventListener("change", () => {
      onChange(input.value);
      this.persist();
    });
    return input;
  }

  private select(
    options: { value: string; label: string }[],
    value: string,
    onChange: (next: string) => void,
    attrs: Record<string, string> = {},
  ): El {
    const select = this.el("select", attrs) as HTMLSelectElement;
    for (const option of options) {
      const el = this.el("option", { value: option.value }, [option.label]);
      select.append(el);
    }
    select.value = value;
    select.addEventListener("change", () => {
      onChange(select.value);
      this.persist();
    });
    return select;
  }

  private button(label: string, onClick: () => void, cls = ""): El {
    const button = this.el("button", { type: "button", class: cls }, [label]);
    button.addEventListener("click", onClick);
    return button;
  }

  // --- rendering ---

  render(): void {
    this.root.replaceChildren();
    const fieldFindings = this.state.report
      ? findingsByField(this.state.report.findings, this.state)
      : new Map<string, Finding[]>();

    this.root.append(this.el("h1", {}, ["IoT SLA wizard"]));
    this.root.append(this.renderStepper());

    if (this.networkError) {
      const banner = this.el("div", { class: "banner error", "data-field": "network" }, [
        this.networkError + " ",
        this.button("Retry", () => {
          void this.refreshCatalog().then(() => this.render());
        }),
      ]);
      this.root.append(banner);
    }

    const panel = this.el("section", { class: "panel" });
    if (this.state.step === "app_slos") {
      this.renderAppSlos(panel, fieldFindings);
    } else if (this.state.step === "workflow_select") {
      this.renderWorkflowSelect(panel, fieldFindings);
    } else if (this.state.step === "activity_forms") {
      this.renderActivityForms(panel, fieldFindings);
    } else {
      this.renderReview(panel, fieldFindings);
    }
    this.root.append(panel);
    this.root.append(this.renderNav());
  }

  private renderStepper(): El {
    const items = Object.entries(STEP_TITLES).map(([step, title]) =>
      this.el(
        "li",
        { class: step === this.state.step ? "active" : "", "data-step": step },
        [title],
      ),
    );
    return this.el("ol", { class: "stepper" }, items);
  }

  private attachFindings(row: El, field: string, fieldFindings: Map<string, Finding[]>): El {
    const findings = fieldFindings.get(field);
    if (findings?.length) {
      row.classList.add("invalid");
      for (const finding of findings) {
        row.append(
          this.el("p", { class: "finding", "data-code": finding.code }, [
            `${finding.code}: ${finding.message}`,
          ]),
        );
      }
    }
    return row;
  }

  private renderLocalProblems(panel: El): void {
    for (const problem of stepProblems(this.state)) {
      panel.append(
        this.el("p", { class: "finding local", "data-problem": problem.field }, [
          problem.message,
        ]),
      );
    }
  }

  private constraintRow(
    entry: ConstraintEntry,
    metric: MetricDefinition,
    field: string,
    fieldFindings: Map<string, Finding[]>,
  ): El {
    const row = this.el("div", { class: "metric-row", "data-field": field });

    const checkbox = this.el("input", { type: "checkbox", "data-role": "check" }) as HTMLInputElement;
    checkbox.checked = entry.checked;
    checkbox.addEventListener("change", () => {
      this.update(() => {
        entry.checked = checkbox.checked;
      });
    });

    const label = this.el("label", {}, [
      checkbox,
      ` ${metric.display_name} `,
      this.el("small", {}, [this.metricHint(metric)]),
    ]);
    row.append(label);

    if (entry.checked) {
      const controls = this.el("span", { class: "controls" });
      controls.append(
        this.select(
          ["high", "normal", "low"].map((p) => ({ value: p, label: p })),
          entry.priority,
          (next) => {
            entry.priority = next as ConstraintEntry["priority"];
          },
          { "data-role": "priority" },
        ),
      );
      controls.append(
        this.select(
          metric.allowed_operators.map((op) => ({ value: op, label: op })),
          entry.operator,
          (next) => {
            entry.operator = next;
          },
          { "data-role": "operator" },
        ),
      );
      controls.append(this.valueControl(entry, metric));
      if (metric.unit) controls.append(this.el("span", { class: "unit" }, [metric.unit]));
      row.append(controls);
    }
    return this.attachFindings(row, field, fieldFindings);
  }

  private metricHint(metric: MetricDefinition): string {
    if (metric.value_type === "enum") {
      return `(${metric.enum_values?.join(" | ") ?? ""})`;
    }
    if (metric.value_type === "numeric" || metric.value_type === "percentage") {
      const low = metric.range_min ?? "-∞";
      const high = metric.range_max ?? "∞";
      return `(${metric.category}, ${low}..${high}${metric.unit ? " " + metric.unit : ""})`;
    }
    return `(${metric.category}, ${metric.value_type})`;
  }

  private valueControl(entry: ConstraintEntry, metric: MetricDefinition): El {
    if (metric.value_type === "enum") {
      return this.select(
        (metric.enum_values ?? []).map((v) => ({ value: v, label: v })),
        entry.value,
        (next) => {
          entry.value = next;
        },
        { "data-role": "value" },
      );
    }
    if (metric.value_type === "boolean") {
      return this.select(
        [
          { value: "true", label: "true" },
          { value: "false", label: "false" },
        ],
        entry.value,
        (next) => {
          entry.value = next;
        },
        { "data-role": "value" },
      );
    }
    const input = this.el("input", { type: "text", "data-role": "value" }) as HTMLInputElement;
    input.value = entry.value;
    input.addEventListener("change", () => {
      entry.value = input.value;
      this.persist();
    });
    return input;
  }

  // --- step (a): application SLOs ---

  private renderAppSlos(panel: El, fieldFindings: Map<string, Finding[]>): void {
    panel.append(this.el("h2", {}, ["Describe the application and its SLOs"]));

    const headerBox = this.el("div", { class: "header-box" });
    const typeRow = this.el("div", { class: "field", "data-field": "header.type" }, [
      this.el("label", {}, ["Application type"]),
      this.textInput(
        "header.type.input",
        this.state.header.type,
        (next) => {
          this.state.header.type = next;
        },
        "e.g. Remote Health Monitoring",
      ),
    ]);
    const startRow = this.el(
      "div",
      { class: "field", "data-field": "header.agreement_start" },
      [
        this.el("label", {}, ["Agreement start (UTC)"]),
        this.textInput(
          "header.agreement_start.input",
          this.state.header.agreement_start,
          (next) => {
            this.state.header.agreement_start = next;
          },
          "2024-01-01T00:00:00Z",
        ),
      ],
    );
    const endRow = this.el(
      "div",
      { class: "field", "data-field": "header.agreement_end" },
      [
        this.el("label", {}, ["Agreement end (UTC)"]),
        this.textInput(
          "header.agreement_end.input",
          this.state.header.agreement_end,
          (next) => {
            this.state.header.agreement_end = next;
          },
          "2025-01-01T00:00:00Z",
        ),
      ],
    );
    this.attachFindings(startRow, "header.agreement_start", fieldFindings);
    headerBox.append(typeRow, startRow, endRow);
    panel.append(headerBox);

    panel.append(this.el("h3", {}, ["Application-level SLOs"]));
    const list = this.el("div", { class: "metric-list", "data-field": "app-slo-list" });
    this.state.appSlos.forEach((entry, index) => {
      const metric = this.appMetrics[index];
      if (!metric) return;
      list.append(
        this.constraintRow(entry, metric, `app_slo:${entry.metric_id}`, fieldFindings),
      );
    });
    panel.append(list);
    this.renderLocalProblems(panel);
  }

  // --- step (b): workflow selection & connection ---

  private renderWorkflowSelect(panel: El, fieldFindings: Map<string, Finding[]>): void {
    panel.append(this.el("h2", {}, ["Select and connect workflow activities"]));

    const box = this.el("div", { class: "activity-pick", "data-field": "workflow" });
    for (const activity of this.activities) {
      const checkbox = this.el("input", { type: "checkbox" }) as HTMLInputElement;
      checkbox.checked = this.state.selected.includes(activity.name);
      checkbox.addEventListener("change", () => {
        this.update(() => toggleActivity(this.state, activity.name));
      });
      const binding = activity.programming_model
        ? `${activity.deployment_layer} · ${activity.programming_model}`
        : activity.deployment_layer;
      box.append(
        this.el("div", { class: "activity-option", "data-activity": activity.name }, [
          this.el("label", {}, [checkbox, ` ${activity.name} `, this.el("small", {}, [binding])]),
        ]),
      );
    }
    this.attachFindings(box, "workflow", fieldFindings);
    panel.append(box);

    if (this.state.selected.length > 0) {
      panel.append(this.el("h3", {}, ["Data flow (selection order)"]));
      const ordered = this.el("ol", { class: "flow", "data-field": "flow" });
      this.state.selected.forEach((name, index) => {
        const item = this.el("li", { "data-node": `n${index + 1}` }, [`${name} `]);
        item.append(
          this.button("↑", () => this.update(() => moveActivity(this.state, name, -1))),
          this.button("↓", () => this.update(() => moveActivity(this.state, name, 1))),
        );
        ordered.append(item);
      });
      panel.append(ordered);

      const advanced = this.el("input", { type: "checkbox", "data-field": "advanced" }) as HTMLInputElement;
      advanced.checked = this.state.advancedEdges;
      advanced.addEventListener("change", () => {
        this.update(() => {
          this.state.advancedEdges = advanced.checked;
          if (advanced.checked && this.state.edges.length === 0) {
            this.state.edges = effectiveEdges({ ...this.state, advancedEdges: false });
          }
        });
      });
      panel.append(this.el("label", { class: "advanced-toggle" }, [
        advanced,
        " Edit edges explicitly (fan-out / fan-in)",
      ]));

      if (this.state.advancedEdges) this.renderEdgeEditor(panel, fieldFindings);
    }
    this.renderLocalProblems(panel);
  }

  private renderEdgeEditor(panel: El, fieldFindings: Map<string, Finding[]>): void {
    const box = this.el("div", { class: "edge-editor", "data-field": "edges" });
    const options = this.state.selected.map((name, index) => ({
      value: `n${index + 1}`,
      label: `n${index + 1} ${name}`,
    }));
    this.state.edges.forEach((edge, index) => {
      const row = this.el("div", { class: "edge-row" });
      row.append(
        this.select(options, edge.from, (next) => {
          edge.from = next;
        }),
        this.el("span", {}, [" → "]),
        this.select(options, edge.to, (next) => {
          edge.to = next;
        }),
        this.button("remove", () => this.update(() => this.state.edges.splice(index, 1))),
      );
      box.append(row);
    });
    box.append(
      this.button("add edge", () =>
        this.update(() => {
          if (options.length > 0) {
            this.state.edges.push({
              from: options[0].value,
              to: options[options.length - 1].value,
            });
          }
        }),
      ),
    );
    this.attachFindings(box, "edges", fieldFindings);
    panel.append(box);
  }

  // --- step (c): per-activity constraint forms ---

  private renderActivityForms(panel: El, fieldFindings: Map<string, Finding[]>): void {
    panel.append(this.el("h2", {}, ["Constrain each selected activity"]));
    this.state.selected.forEach((name, index) => {
      const schema = this.schemas[name];
      const forms = this.state.forms[name];
      const section = this.el("section", {
        class: "activity-form",
        "data-field": `activity:${name}`,
      });
      section.append(this.el("h3", {}, [`${index + 1}. ${name}`]));
      if (!schema || !forms) {
        section.append(this.el("p", {}, ["Loading metric schema…"]));
        panel.append(section);
        return;
      }
      this.renderScopeGroup(section, name, "layer",
        `Deployment layer: ${schema.deployment_layer}`, forms, schema, fieldFindings);
      if (schema.programming_model) {
        this.renderScopeGroup(section, name, "model",
          `Programming model: ${schema.programming_model}`, forms, schema, fieldFindings);
      }
      this.renderScopeGroup(section, name, "activity", "Activity metrics",
        forms, schema, fieldFindings);
      this.attachFindings(section, `activity:${name}`, fieldFindings);
      panel.append(section);
    });
    this.renderLocalProblems(panel);
  }

  private renderScopeGroup(
    section: El,
    name: string,
    scope: keyof ActivityForms,
    title: string,
    forms: ActivityForms,
    schema: ActivitySchema,
    fieldFindings: Map<string, Finding[]>,
  ): void {
    const metrics = schema.metrics[scope];
    if (metrics.length === 0) return;
    section.append(this.el("h4", {}, [title]));
    forms[scope].forEach((entry, index) => {
      const metric = metrics[index];
      if (!metric) return;
      section.append(
        this.constraintRow(entry, metric, `metric:${name}:${scope}:${entry.metric_id}`, fieldFindings),
      );
    });
  }

  // --- step (d): review, validate, store ---

  private renderReview(panel: El, fieldFindings: Map<string, Finding[]>): void {
    panel.append(this.el("h2", {}, ["Review, validate, and store"]));

    const globalFindings = fieldFindings.get("global") ?? [];
    if (globalFindings.length) {
      const banner = this.el("div", { class: "banner error", "data-field": "global" });
      for (const finding of globalFindings) {
        banner.append(this.el("p", { class: "finding" }, [`${finding.code}: ${finding.message}`]));
      }
      panel.append(banner);
    }

    if (this.state.createdId) {
      panel.append(
        this.el("div", { class: "done", "data-field": "created" }, [
          this.el("p", {}, ["Stored. Document id:"]),
          this.el("code", { "data-role": "created-id" }, [this.state.createdId]),
        ]),
      );
      panel.append(
        this.button("Download canonical JSON", () => void this.downloadCanonical(), "primary"),
        this.button("Start a new SLA", () => {
          this.update(() => {
            const fresh = initialState();
            if (this.storage) clearState(this.storage);
            this.state = fresh;
            this.state.appSlos = syncEntries([], this.appMetrics);
          });
        }),
      );
      return;
    }

    const report = this.state.report;
    const status = this.el("p", { class: "status", "data-role": "report-status" }, [
      report === null
        ? "Validating…"
        : report.valid
          ? "Document is valid."
          : `Document has ${report.findings.length} finding(s); fix the highlighted fields.`,
    ]);
    panel.append(status);

    if (report && !report.valid) {
      const list = this.el("ul", { class: "finding-list" });
      for (const finding of report.findings) {
        const item = this.el("li", { "data-code": finding.code }, [
          `${finding.code} at ${finding.path || "(document)"}: ${finding.message} `,
        ]);
        const anchor = resolveFindingAnchor(finding, this.state);
        if (anchor.step !== "review") {
          item.append(
            this.button("go to field", () =>
              this.update(() => {
                this.state.step = anchor.step;
              }),
            ),
          );
        }
        list.append(item);
      }
      panel.append(list);
    }

    const preview = this.el("pre", { class: "json-preview", "data-role": "draft-json" });
    preview.textContent = JSON.stringify(this.currentDocument(), null, 2);
    panel.append(preview);

    const submit = this.button(
      this.submitting ? "Storing…" : "Store SLA",
      () => void this.submit(),
      "primary",
    );
    if (!report?.valid || this.submitting) submit.setAttribute("disabled", "disabled");
    submit.setAttribute("data-role", "submit");
    panel.append(submit);
  }

  currentDocument() {
    return buildDocument(this.state, this.appMetrics, this.schemas);
  }

  /** Entering the review step: run server-side validation, keep the report. */
  async validateNow(): Promise<void> {
    this.state.report = null;
    try {
      this.state.report = await this.api.validate(this.currentDocument());
      this.networkError = null;
    } catch (error) {
      this.networkError = `Validation request failed: ${String(error)}`;
    }
    this.persist();
    this.render();
  }

  async submit(): Promise<void> {
    this.submitting = true;
    this.render();
    try {
      const outcome = await this.api.create(this.currentDocument());
      if ("created" in outcome) {
        this.state.createdId = outcome.created.id;
        this.state.report = { valid: true, findings: [] };
      } else {
        this.state.report = outcome.refused;
      }
      this.networkError = null;
    } catch (error) {
      this.networkError = `Store request failed: ${String(error)}`;
    }
    this.submitting = false;
    this.persist();
    this.render();
  }

  private async downloadCanonical(): Promise<void> {
    if (!this.state.createdId) return;
    try {
      const text = await this.api.canonicalBytes(this.state.createdId);
      const blob = new Blob([text], { type: "application/json" });
      const link = this.doc.createElement("a");
      link.href = URL.createObjectURL(blob);
      link.download = `sla-${this.state.createdId.slice(0, 12)}.json`;
      link.click();
    } catch (error) {
      this.networkError = `Download failed: ${String(error)}`;
      this.render();
    }
  }

  // --- navigation ---

  private renderNav(): El {
    const nav = this.el("div", { class: "nav" });
    if (this.state.step !== "app_slos" && !this.state.createdId) {
      nav.append(this.button("Back", () => this.update(() => back(this.state))));
    }
    if (this.state.step !== "review") {
      nav.append(
        this.button(
          "Next",
          () => {
            void this.next();
          },
          "primary",
        ),
      );
    }
    return nav;
  }

  async next(): Promise<void> {
    const before = this.state.step;
    const moved = advance(this.state);
    if (!moved) {
      this.render(); // surface local problems inline; step does not change
      return;
    }
    if (before === "workflow_select") {
      try {
        for (const name of this.state.selected) {
          await this.loadSchema(name);
        }
        this.networkError = null;
      } catch (error) {
        this.networkError = `Could not load activity schemas: ${String(error)}`;
        this.state.step = before;
      }
    }
    this.persist();
    this.render();
    if (this.state.step === "review") {
      await this.validateNow();
    }
  }
}

export function mountWizard(
  root: El,
  api: ApiClient,
  storage: StateStorage | null,
): Wizard {
  const wizard = new Wizard(api, root, storage);
  void wizard.start();
  return wizard;
}

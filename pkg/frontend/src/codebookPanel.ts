// Codebook editor. Edits go through the API and persist server-side;
// the refreshed book list immediately feeds the tier-creation menus.

import { clear, el } from "./dom.js";
import type { CodebookCode, CodebookDoc } from "./types.js";
import type { Workspace } from "./workspace.js";

export class CodebookPanel {
  readonly root: HTMLElement;

  private readonly ws: Workspace;
  private readonly picker: HTMLSelectElement;
  private readonly nameInput: HTMLInputElement;
  private readonly rows: HTMLElement;
  private editing: CodebookDoc | null = null;

  constructor(ws: Workspace, mount: HTMLElement) {
    this.ws = ws;
    this.picker = el("select", { class: "cb-picker" });
    this.picker.addEventListener("change", () => this.startEditing(this.picker.value));
    this.nameInput = el("input", { class: "cb-name", placeholder: "new codebook name" });
    const create = el("button", { class: "cb-create" }, ["New"]);
    create.addEventListener("click", () => this.startNew());
    this.rows = el("div", { class: "cb-rows" });
    const addRow = el("button", { class: "cb-add-code" }, ["Add code"]);
    addRow.addEventListener("click", () => this.addRow({ code: "", description: "", color: null }));
    const save = el("button", { class: "cb-save" }, ["Save"]);
    save.addEventListener("click", () => void this.save());

    this.root = el("section", { class: "codebook" }, [
      el("h3", {}, ["Codebook"]),
      el("div", { class: "cb-head" }, [this.picker, this.nameInput, create]),
      this.rows,
      el("div", { class: "cb-actions" }, [addRow, save]),
    ]);
    mount.append(this.root);

    ws.subscribe(() => this.refreshPicker());
    this.refreshPicker();
    const first = ws.codebooks[0];
    if (first) this.startEditing(first.name);
  }

  private refreshPicker(): void {
    const current = this.picker.value;
    clear(this.picker);
    for (const book of this.ws.codebooks) {
      this.picker.append(el("option", { value: book.name }, [book.name]));
    }
    if (current) this.picker.value = current;
  }

  startEditing(name: string): void {
    const book = this.ws.codebook(name);
    if (!book) return;
    // deep copy: edits stay local until saved
    this.editing = {
      name: book.name,
      codes: book.codes.map((c) => ({ ...c })),
    };
    this.renderRows();
  }

  startNew(): void {
    const name = this.nameInput.value.trim();
    if (!name) {
      this.ws.setStatus("codebook name is required", "error");
      return;
    }
    this.editing = { name, codes: [] };
    this.nameInput.value = "";
    this.renderRows();
  }

  private addRow(code: CodebookCode): void {
    if (!this.editing) return;
    this.editing.codes.push(code);
    this.renderRows();
  }

  private renderRows(): void {
    clear(this.rows);
    if (!this.editing) return;
    this.rows.append(el("div", { class: "cb-editing" }, [`editing: ${this.editing.name}`]));
    this.editing.codes.forEach((code, index) => {
      const codeInput = el("input", { class: "cb-code", value: code.code, placeholder: "code" });
      codeInput.addEventListener("input", () => {
        code.code = codeInput.value;
      });
      const descInput = el("input", {
        class: "cb-desc",
        value: code.description,
        placeholder: "description",
      });
      descInput.addEventListener("input", () => {
        code.description = descInput.value;
      });
      const drop = el("button", { class: "cb-drop" }, ["x"]);
      drop.addEventListener("click", () => {
        this.editing!.codes.splice(index, 1);
        this.renderRows();
      });
      this.rows.append(el("div", { class: "cb-row" }, [codeInput, descInput, drop]));
    });
  }

  async save(): Promise<void> {
    if (!this.editing) return;
    const codes = this.editing.codes.filter((c) => c.code.trim() !== "");
    try {
      await this.ws.api.saveCodebook({ name: this.editing.name, codes });
    } catch (err) {
      this.ws.setStatus(String(err instanceof Error ? err.message : err), "error");
      return;
    }
    await this.ws.refreshCodebooks();
    this.ws.setStatus(`saved codebook ${this.editing.name}`);
    this.startEditing(this.editing.name);
  }
}
